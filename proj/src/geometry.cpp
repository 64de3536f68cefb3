#include "morseflow/geometry.hpp"

#include <cmath>

namespace morseflow {

// ---------------------------------------------------------------- utilities

double halton(std::uint64_t index, std::uint32_t base) {
    double f = 1.0, r = 0.0;
    std::uint64_t i = index + 1; // skip the origin
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

Vec halton_point(std::uint64_t index, int dim) {
    static const std::uint32_t primes[] = {2, 3, 5, 7, 11, 13};
    Vec p(dim);
    for (int d = 0; d < dim; ++d) p[d] = halton(index, primes[d % 6]);
    return p;
}

double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep5_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double smoothstep3(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * (3.0 - 2.0 * t);
}

// ------------------------------------------------------------------- Poly3

double Poly3::value(const Vec& p) const {
    double s = 0.0;
    for (const auto& t : terms_)
        s += t.c * std::pow(p[0], t.i) * std::pow(p[1], t.j) * std::pow(p[2], t.k);
    return s;
}

static double dpow(double x, int n) { return n <= 0 ? 0.0 : n * std::pow(x, n - 1); }
static double d2pow(double x, int n) { return n <= 1 ? 0.0 : double(n) * (n - 1) * std::pow(x, n - 2); }

Vec Poly3::grad(const Vec& p) const {
    Vec g = Vec::Zero(3);
    for (const auto& t : terms_) {
        const double xi = std::pow(p[0], t.i), yj = std::pow(p[1], t.j), zk = std::pow(p[2], t.k);
        g[0] += t.c * dpow(p[0], t.i) * yj * zk;
        g[1] += t.c * xi * dpow(p[1], t.j) * zk;
        g[2] += t.c * xi * yj * dpow(p[2], t.k);
    }
    return g;
}

Mat Poly3::hess(const Vec& p) const {
    Mat h = Mat::Zero(3, 3);
    for (const auto& t : terms_) {
        const double xi = std::pow(p[0], t.i), yj = std::pow(p[1], t.j), zk = std::pow(p[2], t.k);
        const double dx = dpow(p[0], t.i), dy = dpow(p[1], t.j), dz = dpow(p[2], t.k);
        h(0, 0) += t.c * d2pow(p[0], t.i) * yj * zk;
        h(1, 1) += t.c * xi * d2pow(p[1], t.j) * zk;
        h(2, 2) += t.c * xi * yj * d2pow(p[2], t.k);
        h(0, 1) += t.c * dx * dy * zk;
        h(0, 2) += t.c * dx * yj * dz;
        h(1, 2) += t.c * xi * dy * dz;
    }
    h(1, 0) = h(0, 1);
    h(2, 0) = h(0, 2);
    h(2, 1) = h(1, 2);
    return h;
}

AmbientMap Poly3::as_map() const {
    Poly3 self = *this;
    return AmbientMap{
        [self](const Vec& p) { return self.value(p); },
        [self](const Vec& p) { return self.grad(p); },
        [self](const Vec& p) { return self.hess(p); },
    };
}

// ----------------------------------------------------------- ManifoldModel

ManifoldModel ManifoldModel::implicit_surface(AmbientMap G, MetricSpec metric, Vec box_lo, Vec box_hi) {
    ManifoldModel m;
    m.kind_ = ModelKind::ImplicitSurface;
    m.dim_ = 2;
    m.amb_ = 3;
    m.G_ = std::move(G);
    m.metric_ = std::move(metric);
    m.box_lo_ = box_lo.size() ? box_lo : Vec::Constant(3, -1.5);
    m.box_hi_ = box_hi.size() ? box_hi : Vec::Constant(3, 1.5);
    return m;
}

ManifoldModel ManifoldModel::flat_torus(int dim, MetricSpec metric) {
    ManifoldModel m;
    m.kind_ = ModelKind::FlatTorus;
    m.dim_ = dim;
    m.amb_ = dim;
    m.metric_ = std::move(metric);
    m.box_lo_ = Vec::Zero(dim);
    m.box_hi_ = Vec::Ones(dim);
    return m;
}

ManifoldModel ManifoldModel::antipodal_quotient(AmbientMap G, Vec box_lo, Vec box_hi) {
    ManifoldModel m = implicit_surface(std::move(G), {MetricKind::Induced, {}}, std::move(box_lo), std::move(box_hi));
    m.kind_ = ModelKind::AntipodalQuotient;
    return m;
}

ManifoldModel ManifoldModel::real_line(double lo, double hi, double metric_scale) {
    ManifoldModel m;
    m.kind_ = ModelKind::RealLine;
    m.dim_ = 1;
    m.amb_ = 1;
    m.lo_ = lo;
    m.hi_ = hi;
    m.metric_.kind = MetricKind::Explicit;
    m.metric_.matrix = Mat::Constant(1, 1, metric_scale);
    m.box_lo_ = Vec::Constant(1, lo);
    m.box_hi_ = Vec::Constant(1, hi);
    return m;
}

double ManifoldModel::constraint_residual(const Vec& p) const {
    return has_constraint() ? std::abs(G_.value(p)) : 0.0;
}

bool ManifoldModel::on_model(const Vec& p, double tol_scale) const {
    if (has_constraint()) return constraint_residual(p) <= tol.tau_surf * tol_scale;
    if (kind_ == ModelKind::RealLine) return p[0] > lo_ && p[0] < hi_;
    return true;
}

Vec ManifoldModel::constraint_gradient_checked(const Vec& p) const {
    Vec n = G_.grad(p);
    if (n.norm() < tol.eps_reg)
        throw RegularityError("constraint gradient below regularity floor at sampled point");
    return n;
}

Vec ManifoldModel::tangent_project(const Vec& p, const Vec& v) const {
    if (!has_constraint()) return v;
    Vec n = constraint_gradient_checked(p);
    return v - (n.dot(v) / n.squaredNorm()) * n;
}

Vec ManifoldModel::retract(const Vec& p, const Vec& step) const {
    switch (kind_) {
    case ModelKind::FlatTorus: {
        Vec q = p + step;
        for (int i = 0; i < q.size(); ++i) {
            q[i] = std::fmod(q[i], 1.0);
            if (q[i] < 0.0) q[i] += 1.0;
        }
        return q;
    }
    case ModelKind::RealLine:
        return p + step;
    default: {
        Vec q = p + step;
        // Newton projection along grad G back onto the level set.
        for (int it = 0; it < tol.n_proj; ++it) {
            const double g = G_.value(q);
            if (std::abs(g) <= tol.tau_surf) return q;
            Vec n = constraint_gradient_checked(q);
            q -= (g / n.squaredNorm()) * n;
        }
        if (std::abs(G_.value(q)) <= tol.tau_surf) return q;
        throw ProjectionDivergence("Newton projection onto the constraint set failed");
    }
    }
}

Mat ManifoldModel::tangent_frame(const Vec& p) const {
    if (!has_constraint()) return Mat::Identity(amb_, amb_);
    Vec n = constraint_gradient_checked(p);
    n.normalize();
    // Pick the ambient axis least aligned with the normal, project, then
    // complete with the cross product.
    int a = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(n[i]) < std::abs(n[a])) a = i;
    Vec t1 = Vec::Unit(3, a) - n[a] * n;
    t1.normalize();
    Vec t2(3);
    t2[0] = n[1] * t1[2] - n[2] * t1[1];
    t2[1] = n[2] * t1[0] - n[0] * t1[2];
    t2[2] = n[0] * t1[1] - n[1] * t1[0];
    Mat F(3, 2);
    F.col(0) = t1;
    F.col(1) = t2;
    return F;
}

Mat ManifoldModel::metric_at(const Vec& p) const {
    switch (metric_.kind) {
    case MetricKind::Induced:
        // Orthonormalized moving frame: the induced metric is the identity.
        (void)constraint_gradient_checked(p);
        return Mat::Identity(dim_, dim_);
    case MetricKind::Flat:
        return Mat::Identity(dim_, dim_);
    case MetricKind::Explicit:
        return metric_.matrix;
    }
    return Mat::Identity(dim_, dim_);
}

double ManifoldModel::inner(const Vec& p, const Vec& u, const Vec& v) const {
    switch (kind_) {
    case ModelKind::ImplicitSurface:
    case ModelKind::AntipodalQuotient:
        return u.dot(v); // ambient components, induced metric
    default:
        if (metric_.kind == MetricKind::Explicit) return u.dot(metric_.matrix * v);
        return u.dot(v);
    }
}

static double wrapped_delta(double a, double b) {
    double d = std::abs(a - b);
    d = std::fmod(d, 1.0);
    return std::min(d, 1.0 - d);
}

double ManifoldModel::distance(const Vec& p, const Vec& q) const {
    switch (kind_) {
    case ModelKind::FlatTorus: {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += sq(wrapped_delta(p[i], q[i]));
        return std::sqrt(s);
    }
    case ModelKind::RealLine:
        return std::abs(p[0] - q[0]);
    case ModelKind::ImplicitSurface:
        return (p - q).norm();
    case ModelKind::AntipodalQuotient:
        return std::min((p - q).norm(), (p + q).norm());
    }
    return (p - q).norm();
}

Vec ManifoldModel::canonical(const Vec& p) const {
    switch (kind_) {
    case ModelKind::FlatTorus:
        return retract(p, Vec::Zero(dim_));
    case ModelKind::AntipodalQuotient: {
        for (int i = 0; i < p.size(); ++i) {
            if (p[i] > 1e-12) return p;
            if (p[i] < -1e-12) return -p;
        }
        return p;
    }
    default:
        return p;
    }
}

} // namespace morseflow
