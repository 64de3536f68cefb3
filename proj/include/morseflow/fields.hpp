#ifndef MORSEFLOW_FIELDS_HPP
#define MORSEFLOW_FIELDS_HPP

#include "morseflow/geometry.hpp"

#include <functional>
#include <string>

namespace morseflow {

// Scalar function on a model, presented through ambient/chart derivatives.
// Derivatives fall back to central finite differences when not declared.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(std::string name, std::function<double(const Vec&)> value);

    ScalarField& with_gradient(std::function<Vec(const Vec&)> g);
    ScalarField& with_hessian(std::function<Mat(const Vec&)> h);

    const std::string& name() const { return name_; }
    double value(const Vec& p) const { return value_(p); }
    Vec ambient_gradient(const Vec& p) const;
    Mat ambient_hessian(const Vec& p) const;
    bool has_analytic_gradient() const { return bool(grad_); }

    double fd_step = 1e-5;

    static ScalarField from_poly(std::string name, const Poly3& poly);

private:
    std::string name_;
    std::function<double(const Vec&)> value_;
    std::function<Vec(const Vec&)> grad_;
    std::function<Mat(const Vec&)> hess_;
};

struct SylvesterTriple {
    int n_minus = 0;
    int n_zero = 0;
    int n_plus = 0;
    int sum() const { return n_minus + n_zero + n_plus; }
    bool operator==(const SylvesterTriple&) const = default;
};

// Riemannian gradient at p: chart components for flat models (g^{-1} df),
// ambient tangential projection for implicit surfaces.
Vec riemannian_gradient(const ScalarField& f, const ManifoldModel& m, const Vec& p);

// Gradient expressed in the orthonormal tangent frame (dim components).
Vec frame_gradient(const ScalarField& f, const ManifoldModel& m, const Vec& p);

double gradient_norm(const ScalarField& f, const ManifoldModel& m, const Vec& p);

// Metric Hessian in the orthonormal tangent frame; only tensorial at critical
// points, so calls away from them are rejected.
Mat metric_hessian(const ScalarField& f, const ManifoldModel& m, const Vec& p,
                   double tau_crit = 1e-9);

// Same matrix without the criticality gate (used internally by searches that
// know what they are doing near a point).
Mat metric_hessian_unchecked(const ScalarField& f, const ManifoldModel& m, const Vec& p);

SylvesterTriple sylvester_invariants(const Mat& H, double zero_tol);

// Convenience: zero_tol = 1e-6 * ||H||_2.
SylvesterTriple sylvester_invariants(const Mat& H);

} // namespace morseflow

#endif
