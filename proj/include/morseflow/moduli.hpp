#ifndef MORSEFLOW_MODULI_HPP
#define MORSEFLOW_MODULI_HPP

#include "morseflow/algebra.hpp"
#include "morseflow/flow.hpp"

#include <map>

namespace morseflow {

struct ModuliCount {
    std::string source;
    std::string target;
    long count = 0;
    int count_mod2 = 0;
    std::vector<FlowLine> witnesses;
    std::string method; // "shooting-bisection" | "decoupled-analytic" | "declared"
    PairCount as_pair() const { return {source, target, count, count_mod2}; }
};

struct ScanTransition {
    double angle = 0.0;
    std::string saddle;          // index-1 point the boundary trajectory captures
    std::string side_lo_label;   // endpoint of the arc just below the angle
    std::string side_hi_label;   // endpoint of the arc just above
    bool captured = false;       // boundary trajectory entered the witness ball
    bool second_leg_ok = false;  // saddle's unstable trajectories reach the side endpoints
};

struct ModuliScan {
    std::string source;                // index-2 critical point
    std::string bottom;                // index-0 target the scan reports on
    std::vector<double> angles;
    std::vector<std::string> endpoint_labels;
    std::vector<ScanTransition> transitions;
    std::map<std::string, int> boundary_events; // one-sided broken limits per endpoint
    int total_boundary_events() const;
    bool events_even() const;
};

struct ModuliParams {
    double delta_seed = 1e-4;
    int n_scan = 2048;
    int bisect_depth = 50;
    double angle_tol = 1e-10;   // guaranteed localization (bisection runs deeper)
    double r_near = 0.05;       // "passes close to a saddle" radius
    double witness_eps = 1e-4;  // broken-limit witness ball around a saddle
    double witness_grad = 1e-3;
    double unresolved_abort_fraction = 0.01;
    StopRule stop;              // capture rule; crits filled by the driver
};

// Seed on the unstable sphere: retract(c, delta * direction), direction given
// in the orthonormal tangent frame and inside the negative eigenspace.
Vec unstable_seed(const ManifoldModel& m, const ScalarField& f, const CriticalPoint& c,
                  const Vec& frame_direction, double delta);

// Orthonormal basis of the negative eigenspace in the tangent frame.
Mat negative_eigenbasis(const ScalarField& f, const ManifoldModel& m, const CriticalPoint& c);

// Full classification of the unstable circle of an index-2 critical point;
// shared by counting and scanning.
struct CircleScan {
    std::string source;
    std::vector<double> angles;
    std::vector<std::string> endpoint_labels;        // "" when unresolved
    std::vector<ScanTransition> transitions;         // refined, all saddles
    int unresolved = 0;
};

CircleScan scan_unstable_circle(const ManifoldModel& m, const ScalarField& f,
                                const std::vector<CriticalPoint>& crits,
                                const CriticalPoint& c_up, const ModuliParams& prm);

// Count unparametrized flow lines for an index-difference-one pair.
ModuliCount count_flow_lines(const ManifoldModel& m, const ScalarField& f,
                             const std::vector<CriticalPoint>& crits, const CriticalPoint& c_up,
                             const CriticalPoint& c_down, const ModuliParams& prm,
                             const CircleScan* cached_scan = nullptr);

// Scan between an index-2 and an index-0 point: endpoint classification,
// refined transition angles with broken-limit verification.
ModuliScan moduli_scan(const ManifoldModel& m, const ScalarField& f,
                       const std::vector<CriticalPoint>& crits, const CriticalPoint& c_up,
                       const CriticalPoint& c_bottom, const ModuliParams& prm,
                       const CircleScan* cached_scan = nullptr);

// Halve covering counts along antipodal identification.
std::vector<ModuliCount> quotient_count(const std::vector<ModuliCount>& cover_counts,
                                        const std::vector<CriticalClass>& classes);

} // namespace morseflow

#endif
