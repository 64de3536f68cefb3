#ifndef MORSEFLOW_FLOW_HPP
#define MORSEFLOW_FLOW_HPP

#include "morseflow/critical.hpp"

#include <functional>
#include <optional>

namespace morseflow {

struct FlowSample {
    double s;
    Vec p; // cover coordinates (never wrapped, so interpolation stays smooth)
    Vec v; // velocity at the sample, exact from the ODE
};

struct DecayFit {
    double rate = 0.0;
    double residual = 0.0;
};

struct FlowLine {
    std::vector<FlowSample> samples;
    std::optional<std::string> source;
    std::optional<std::string> target;
    double energy = 0.0;             // quadrature accumulated by the integrator
    double monotone_violation = 0.0; // max observed increase of f along the line
    std::optional<DecayFit> decay_fit;
    double final_time() const { return samples.empty() ? 0.0 : samples.back().s; }
    bool resolved() const { return source.has_value() && target.has_value(); }
};

struct StopRule {
    const std::vector<CriticalPoint>* crits = nullptr;
    double eps_capture = 1e-6;
    double grad_capture = 1e-6;
    double s_max = 500.0;
};

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-13;
    double s_begin = 0.0;
    bool backward = false; // integrate +grad f (stable-manifold shooting)
    bool record = true;
};

// Time-dependent velocity field on the model (autonomous fields ignore s).
using VelocityField = std::function<Vec(double, const Vec&)>;

VelocityField gradient_flow_field(const ScalarField& f, const ManifoldModel& m, bool backward = false);

// Adaptive embedded Runge-Kutta 5(4) with constraint retraction after each
// accepted step; stops on capture at a listed critical point or at s_max.
FlowLine integrate(const ManifoldModel& m, const ScalarField& f, const Vec& start,
                   const StopRule& stop, const IntegrateOptions& opts = {});

// Raw driver used by the continuation module: integrates an arbitrary field,
// appending to an existing line.
void integrate_field(const ManifoldModel& m, const VelocityField& field, Vec start,
                     double s_begin, double s_end, const StopRule* stop,
                     const IntegrateOptions& opts, FlowLine& line,
                     const ScalarField* monotone_of = nullptr);

// Energy from the stored samples: per-interval Gauss quadrature of |x'|_g^2 on
// the cubic Hermite reconstruction.
double energy(const FlowLine& line, const ManifoldModel& m);

// Least-squares slope of log(distance to target) over the resolved tail.
DecayFit decay_rate(const FlowLine& line, const ManifoldModel& m, const CriticalPoint& target,
                    double tail_fraction = 0.3);

struct KappaEstimate {
    double kappa_hat = 0.0;  // max |f - f(c)| / |grad f|_g^2 over samples
    double paper_bound = 0.0; // 1/(2 min |eigenvalue|) at the critical point
    int samples = 0;
};

KappaEstimate action_energy_kappa(const ScalarField& f, const ManifoldModel& m,
                                  const CriticalPoint& crit, double neighborhood_radius,
                                  int n_samples = 4096);

// Cubic Hermite evaluation of a flow line at arbitrary time (clamped to the
// sampled range).
Vec eval_line(const FlowLine& line, double s);
Vec eval_line_velocity(const FlowLine& line, double s);

struct PreglueResult {
    std::vector<double> grid;            // s in [-T, T]
    std::vector<Vec> chart_path;         // chart coordinates around c
    std::vector<Vec> manifold_path;      // mapped back to the model
    std::vector<double> residual_profile; // per-grid-point defect
    double residual = 0.0;               // max over the grid
};

// Cutoff-interpolated approximate trajectory built from a line flowing into c
// and a line flowing out of c, on a star-shaped normal chart at c.
PreglueResult preglue(const ManifoldModel& m, const ScalarField& f, const FlowLine& up,
                      const FlowLine& down, const CriticalPoint& c, double T,
                      const std::function<double(double)>& cutoff = nullptr,
                      double chart_radius = 0.35);

} // namespace morseflow

#endif
