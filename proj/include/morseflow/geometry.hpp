#ifndef MORSEFLOW_GEOMETRY_HPP
#define MORSEFLOW_GEOMETRY_HPP

#include "morseflow/common.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace morseflow {

enum class ModelKind { ImplicitSurface, FlatTorus, AntipodalQuotient, RealLine };

enum class MetricKind { Induced, Flat, Explicit };

// Scalar map on ambient 3-space with analytic derivatives (constraint G or a
// field defined through the embedding).
struct AmbientMap {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    std::function<Mat(const Vec&)> hess;
};

// Trivariate polynomial sum c_{ijk} x^i y^j z^k; provides its own derivatives.
class Poly3 {
public:
    struct Term {
        int i, j, k;
        double c;
    };

    Poly3() = default;
    explicit Poly3(std::vector<Term> terms) : terms_(std::move(terms)) {}

    double value(const Vec& p) const;
    Vec grad(const Vec& p) const;
    Mat hess(const Vec& p) const;

    AmbientMap as_map() const;
    const std::vector<Term>& terms() const { return terms_; }

private:
    std::vector<Term> terms_;
};

struct MetricSpec {
    MetricKind kind = MetricKind::Flat;
    Mat matrix; // Explicit only: constant SPD matrix on the chart
};

// One of: implicit surface {G=0} in R^3 with the induced metric, flat n-torus
// with coordinates in [0,1)^n, antipodal quotient of an implicit sphere, or an
// open interval of the real line.
class ManifoldModel {
public:
    static ManifoldModel implicit_surface(AmbientMap G, MetricSpec metric = {MetricKind::Induced, {}},
                                          Vec box_lo = Vec(), Vec box_hi = Vec());
    static ManifoldModel flat_torus(int dim, MetricSpec metric = {MetricKind::Flat, {}});
    static ManifoldModel antipodal_quotient(AmbientMap G, Vec box_lo = Vec(), Vec box_hi = Vec());
    static ManifoldModel real_line(double lo, double hi, double metric_scale = 1.0);

    ModelKind kind() const { return kind_; }
    int dim() const { return dim_; }          // intrinsic dimension
    int ambient_dim() const { return amb_; }  // representation dimension
    const AmbientMap& constraint() const { return G_; }
    bool has_constraint() const { return kind_ == ModelKind::ImplicitSurface || kind_ == ModelKind::AntipodalQuotient; }
    double interval_lo() const { return lo_; }
    double interval_hi() const { return hi_; }
    const MetricSpec& metric() const { return metric_; }
    const Vec& box_lo() const { return box_lo_; }
    const Vec& box_hi() const { return box_hi_; }

    Tolerances tol;

    // Orthogonal projection of an ambient vector onto the tangent space at p.
    Vec tangent_project(const Vec& p, const Vec& v) const;

    // Move from p by a tangent step and re-impose the constraint (Newton
    // projection along grad G for surfaces, coordinate wrap for tori).
    Vec retract(const Vec& p, const Vec& step) const;

    // Metric matrix in the canonical frame at p: identity in the orthonormal
    // tangent frame for surfaces, the declared matrix on flat charts.
    Mat metric_at(const Vec& p) const;

    // Chordal / wrapped / quotient distance used for neighborhood tests.
    double distance(const Vec& p, const Vec& q) const;

    // Orthonormal tangent frame, columns = frame vectors (ambient components).
    // Identity for charts.
    Mat tangent_frame(const Vec& p) const;

    // Canonical representative: wrap torus coordinates into [0,1)^n, pick the
    // antipodal representative whose first nonzero coordinate is positive.
    Vec canonical(const Vec& p) const;

    bool on_model(const Vec& p, double tol_scale = 1.0) const;
    double constraint_residual(const Vec& p) const;

    // |grad G| with the regularity check applied.
    Vec constraint_gradient_checked(const Vec& p) const;

    // g-inner product of tangent vectors given in ambient/chart components.
    double inner(const Vec& p, const Vec& u, const Vec& v) const;
    double norm(const Vec& p, const Vec& v) const { return std::sqrt(inner(p, v, v)); }

private:
    ModelKind kind_ = ModelKind::FlatTorus;
    int dim_ = 2;
    int amb_ = 2;
    AmbientMap G_;
    MetricSpec metric_;
    double lo_ = 0.0, hi_ = 1.0;
    Vec box_lo_, box_hi_;
};

// Tangent vector with its base point; components are ambient for surfaces and
// chart components for flat models.
struct TangentVector {
    Vec base;
    Vec components;
};

} // namespace morseflow

#endif
