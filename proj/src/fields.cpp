#include "morseflow/fields.hpp"

#include <Eigen/Eigenvalues>

namespace morseflow {

ScalarField::ScalarField(std::string name, std::function<double(const Vec&)> value)
    : name_(std::move(name)), value_(std::move(value)) {}

ScalarField& ScalarField::with_gradient(std::function<Vec(const Vec&)> g) {
    grad_ = std::move(g);
    return *this;
}

ScalarField& ScalarField::with_hessian(std::function<Mat(const Vec&)> h) {
    hess_ = std::move(h);
    return *this;
}

Vec ScalarField::ambient_gradient(const Vec& p) const {
    if (grad_) return grad_(p);
    const int n = int(p.size());
    Vec g(n);
    Vec q = p;
    for (int i = 0; i < n; ++i) {
        q[i] = p[i] + fd_step;
        const double fp = value_(q);
        q[i] = p[i] - fd_step;
        const double fm = value_(q);
        q[i] = p[i];
        g[i] = (fp - fm) / (2.0 * fd_step);
    }
    return g;
}

Mat ScalarField::ambient_hessian(const Vec& p) const {
    if (hess_) return hess_(p);
    const int n = int(p.size());
    Mat h(n, n);
    Vec q = p;
    const double d = fd_step;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (i == j) {
                q[i] = p[i] + d;
                const double fp = value_(q);
                q[i] = p[i] - d;
                const double fm = value_(q);
                q[i] = p[i];
                h(i, i) = (fp - 2.0 * value_(p) + fm) / (d * d);
            } else {
                q[i] = p[i] + d; q[j] = p[j] + d;
                const double fpp = value_(q);
                q[j] = p[j] - d;
                const double fpm = value_(q);
                q[i] = p[i] - d; q[j] = p[j] + d;
                const double fmp = value_(q);
                q[j] = p[j] - d;
                const double fmm = value_(q);
                q[i] = p[i]; q[j] = p[j];
                h(i, j) = h(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * d * d);
            }
        }
    }
    return h;
}

ScalarField ScalarField::from_poly(std::string name, const Poly3& poly) {
    AmbientMap m = poly.as_map();
    ScalarField f(std::move(name), m.value);
    f.with_gradient(m.grad).with_hessian(m.hess);
    return f;
}

Vec riemannian_gradient(const ScalarField& f, const ManifoldModel& m, const Vec& p) {
    Vec df = f.ambient_gradient(p);
    switch (m.kind()) {
    case ModelKind::ImplicitSurface:
    case ModelKind::AntipodalQuotient:
        return m.tangent_project(p, df);
    default:
        if (m.metric().kind == MetricKind::Explicit)
            return m.metric().matrix.ldlt().solve(df);
        return df;
    }
}

Vec frame_gradient(const ScalarField& f, const ManifoldModel& m, const Vec& p) {
    Vec g = riemannian_gradient(f, m, p);
    if (m.has_constraint()) return m.tangent_frame(p).transpose() * g;
    return g;
}

double gradient_norm(const ScalarField& f, const ManifoldModel& m, const Vec& p) {
    Vec g = riemannian_gradient(f, m, p);
    return m.norm(p, g);
}

Mat metric_hessian_unchecked(const ScalarField& f, const ManifoldModel& m, const Vec& p) {
    switch (m.kind()) {
    case ModelKind::ImplicitSurface:
    case ModelKind::AntipodalQuotient: {
        // Lagrange-corrected second derivative restricted to the tangent
        // plane: Hess f - lambda Hess G, lambda = <grad f, grad G>/|grad G|^2.
        Vec n = m.constraint_gradient_checked(p);
        const double lambda = f.ambient_gradient(p).dot(n) / n.squaredNorm();
        Mat H = f.ambient_hessian(p) - lambda * m.constraint().hess(p);
        Mat F = m.tangent_frame(p);
        Mat Ht = F.transpose() * H * F;
        return 0.5 * (Ht + Ht.transpose());
    }
    default: {
        Mat H = f.ambient_hessian(p);
        if (m.metric().kind == MetricKind::Explicit) {
            // Self-adjoint operator g^{-1} H expressed in a g-orthonormal
            // frame: g^{-1/2} H g^{-1/2}.
            Eigen::SelfAdjointEigenSolver<Mat> es(m.metric().matrix);
            Mat s = es.operatorInverseSqrt();
            Mat Ht = s * H * s;
            return 0.5 * (Ht + Ht.transpose());
        }
        return 0.5 * (H + H.transpose());
    }
    }
}

Mat metric_hessian(const ScalarField& f, const ManifoldModel& m, const Vec& p, double tau_crit) {
    if (gradient_norm(f, m, p) > tau_crit)
        throw NotCriticalError("metric Hessian requested away from a critical point");
    return metric_hessian_unchecked(f, m, p);
}

SylvesterTriple sylvester_invariants(const Mat& H, double zero_tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    SylvesterTriple t;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double ev = es.eigenvalues()[i];
        if (ev < -zero_tol)
            ++t.n_minus;
        else if (ev > zero_tol)
            ++t.n_plus;
        else
            ++t.n_zero;
    }
    return t;
}

SylvesterTriple sylvester_invariants(const Mat& H) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    return sylvester_invariants(H, 1e-6 * scale);
}

} // namespace morseflow
