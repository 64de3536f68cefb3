#include "morseflow/critical.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace morseflow {

double CriticalPoint::smallest_positive_eigenvalue() const {
    double best = std::numeric_limits<double>::infinity();
    for (double e : hessian_eigenvalues)
        if (e > 0.0) best = std::min(best, e);
    return best;
}

double CriticalPoint::largest_negative_eigenvalue_magnitude() const {
    double best = 0.0;
    for (double e : hessian_eigenvalues)
        if (e < 0.0) best = std::max(best, -e);
    return best;
}

namespace {

// One damped Newton run on a chart (flat torus / real line): solve df = 0.
std::optional<Vec> newton_chart(const ScalarField& f, const ManifoldModel& m, Vec p,
                                const SearchParams& prm) {
    for (int it = 0; it < prm.max_newton_iter; ++it) {
        Vec g = f.ambient_gradient(p);
        if (g.norm() <= prm.newton_tol) return m.canonical(p);
        Mat H = f.ambient_hessian(p);
        Vec step = H.fullPivLu().solve(-g);
        if (!step.allFinite()) return std::nullopt;
        // Backtracking on |df|.
        double t = 1.0;
        const double g0 = g.norm();
        for (int bt = 0; bt < 40; ++bt) {
            Vec q = m.kind() == ModelKind::FlatTorus ? m.retract(p, t * step) : (p + t * step).eval();
            if (m.kind() == ModelKind::RealLine && (q[0] <= m.interval_lo() || q[0] >= m.interval_hi()))
                { t *= 0.5; continue; }
            if (f.ambient_gradient(q).norm() < g0 * (1.0 - 0.25 * t) || t < 1e-6) {
                p = q;
                break;
            }
            t *= 0.5;
            if (bt == 39) return std::nullopt;
        }
    }
    if (f.ambient_gradient(p).norm() <= prm.newton_tol) return m.canonical(p);
    return std::nullopt;
}

// Lagrange system on an implicit surface: F(p,l) = (grad f - l grad G, G).
std::optional<Vec> newton_surface(const ScalarField& f, const ManifoldModel& m, Vec p,
                                  const SearchParams& prm) {
    const AmbientMap& G = m.constraint();
    Vec n0 = G.grad(p);
    if (n0.norm() < m.tol.eps_reg) return std::nullopt;
    double lam = f.ambient_gradient(p).dot(n0) / n0.squaredNorm();

    auto residual = [&](const Vec& q, double l) {
        Vec r(4);
        r.head(3) = f.ambient_gradient(q) - l * G.grad(q);
        r[3] = G.value(q);
        return r;
    };

    for (int it = 0; it < prm.max_newton_iter; ++it) {
        Vec r = residual(p, lam);
        const double grad_norm = m.tangent_project(p, f.ambient_gradient(p)).norm();
        if (grad_norm <= prm.newton_tol && std::abs(r[3]) <= m.tol.tau_surf)
            return p;
        Mat J = Mat::Zero(4, 4);
        J.block<3, 3>(0, 0) = f.ambient_hessian(p) - lam * G.hess(p);
        J.block<3, 1>(0, 3) = -G.grad(p);
        J.block<1, 3>(3, 0) = G.grad(p).transpose();
        Vec step = J.fullPivLu().solve(-r);
        if (!step.allFinite()) return std::nullopt;
        double t = 1.0;
        const double r0 = r.norm();
        for (int bt = 0; bt < 40; ++bt) {
            Vec q = p + t * step.head(3);
            const double l = lam + t * step[3];
            if (residual(q, l).norm() < r0 * (1.0 - 0.25 * t) || t < 1e-6) {
                p = q;
                lam = l;
                break;
            }
            t *= 0.5;
            if (bt == 39) return std::nullopt;
        }
    }
    Vec r = residual(p, lam);
    if (m.tangent_project(p, f.ambient_gradient(p)).norm() <= prm.newton_tol &&
        std::abs(r[3]) <= m.tol.tau_surf)
        return p;
    return std::nullopt;
}

Vec seed_for(const ManifoldModel& m, std::uint64_t k) {
    const Vec u = halton_point(k, m.ambient_dim());
    Vec p = m.box_lo() + u.cwiseProduct(m.box_hi() - m.box_lo());
    return p;
}

// Project a box seed onto the surface; fails quietly far from the level set.
std::optional<Vec> project_seed(const ManifoldModel& m, const Vec& p) {
    try {
        return m.retract(p, Vec::Zero(3));
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace

CriticalPoint classify(const ScalarField& f, const ManifoldModel& m, const Vec& p, double tau_crit) {
    const double grad = gradient_norm(f, m, p);
    if (grad > tau_crit) throw NotCriticalError("classify called on a non-stationary point");
    CriticalPoint c;
    // covering points of a quotient keep their covering location; pairing
    // happens later in quotient_identify
    c.location = m.kind() == ModelKind::AntipodalQuotient ? p : m.canonical(p);
    c.value = f.value(p);
    Mat H = metric_hessian_unchecked(f, m, p);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    c.hessian_eigenvalues.assign(es.eigenvalues().data(),
                                 es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(c.hessian_eigenvalues.begin(), c.hessian_eigenvalues.end());
    // Degeneracy tolerance: a residual gradient g at a cubic-order point
    // leaves eigenvalue noise ~ sqrt(g * C3), C3 the local third-derivative
    // scale probed by Hessian variation.
    double c3 = 0.0;
    {
        const double h = 1e-3;
        Mat F = m.tangent_frame(p);
        for (int d = 0; d < m.dim(); ++d) {
            Vec step = m.has_constraint() ? Vec(F.col(d) * h) : Vec(h * Vec::Unit(m.dim(), d));
            try {
                Mat Hp = metric_hessian_unchecked(f, m, m.retract(p, step));
                c3 = std::max(c3, (Hp - H).norm() / h);
            } catch (const Error&) {
            }
        }
    }
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const double zero_tol = std::max(1e-6 * scale, 3.0 * std::sqrt(std::max(grad, 1e-14) * c3));
    c.sylvester = sylvester_invariants(H, zero_tol);
    c.morse_index = c.sylvester.n_minus;
    c.degenerate = c.sylvester.n_zero > 0;
    return c;
}

std::vector<CriticalPoint> label_sorted(std::vector<CriticalPoint> crits) {
    std::sort(crits.begin(), crits.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.value != b.value) return a.value > b.value;
        for (int i = 0; i < a.location.size(); ++i)
            if (a.location[i] != b.location[i]) return a.location[i] < b.location[i];
        return false;
    });
    for (size_t i = 0; i < crits.size(); ++i) crits[i].label = "c" + std::to_string(i);
    return crits;
}

CriticalSearchResult find_critical_points(const ScalarField& f, const ManifoldModel& m,
                                          const SearchParams& params) {
    CriticalSearchResult out;
    out.stats.seeds = params.seed_count;
    std::vector<Vec> found;
    for (int k = 0; k < params.seed_count; ++k) {
        Vec seed = seed_for(m, std::uint64_t(k));
        std::optional<Vec> hit;
        if (m.has_constraint()) {
            auto s = project_seed(m, seed);
            if (!s) {
                ++out.stats.dropped;
                continue;
            }
            hit = newton_surface(f, m, *s, params);
        } else {
            hit = newton_chart(f, m, seed, params);
        }
        if (!hit) {
            ++out.stats.dropped;
            continue;
        }
        ++out.stats.converged;
        // quotient covers keep both antipodal points: dedup with the covering
        // (chordal) distance rather than the identified one
        const bool cover = m.kind() == ModelKind::AntipodalQuotient;
        Vec p = cover ? *hit : m.canonical(*hit);
        bool dup = false;
        for (auto& q : found) {
            const double d = cover ? (p - q).norm() : m.distance(p, q);
            if (d < params.dedup_radius) {
                // keep the better of the two
                if (gradient_norm(f, m, p) < gradient_norm(f, m, q)) q = p;
                dup = true;
                break;
            }
        }
        if (!dup) found.push_back(p);
    }
    for (const auto& p : found) out.points.push_back(classify(f, m, p, 10.0 * params.newton_tol));
    out.points = label_sorted(std::move(out.points));
    out.stats.distinct = int(out.points.size());
    out.stats.empty_result = out.points.empty();
    return out;
}

std::vector<double> spectrum(const std::vector<CriticalPoint>& crits, double tau_val) {
    std::vector<double> vals;
    vals.reserve(crits.size());
    for (const auto& c : crits) vals.push_back(c.value);
    std::sort(vals.begin(), vals.end());
    std::vector<double> out;
    for (double v : vals) {
        if (out.empty() || v - out.back() > tau_val) out.push_back(v);
    }
    return out;
}

std::vector<CriticalClass> quotient_identify(const std::vector<CriticalPoint>& crits,
                                             const ScalarField& f, const ManifoldModel& m) {
    // Field must descend to the quotient.
    for (const auto& c : crits) {
        const double fp = f.value(c.location);
        const double fm = f.value((-c.location).eval());
        if (std::abs(fp - fm) > 1e-10)
            throw NotInvariantError("field is not antipodally invariant at " + c.label);
    }
    std::vector<CriticalClass> classes;
    std::vector<bool> used(crits.size(), false);
    for (size_t i = 0; i < crits.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        CriticalClass cls;
        cls.orbit.push_back(crits[i]);
        for (size_t j = i + 1; j < crits.size(); ++j) {
            if (used[j]) continue;
            if ((crits[i].location + crits[j].location).norm() < 1e-6) {
                used[j] = true;
                cls.orbit.push_back(crits[j]);
                break;
            }
        }
        if (cls.orbit.size() != 2)
            throw OddOrbitError("critical point " + crits[i].label + " has no antipodal partner");
        cls.representative = cls.orbit.front();
        cls.representative.location = m.canonical(cls.representative.location);
        classes.push_back(std::move(cls));
    }
    // relabel representatives
    std::vector<CriticalPoint> reps;
    for (auto& c : classes) reps.push_back(c.representative);
    reps = label_sorted(std::move(reps));
    for (size_t i = 0; i < classes.size(); ++i) {
        for (auto& c : classes) {
            if ((c.representative.location - reps[i].location).norm() < 1e-12)
                c.representative.label = reps[i].label;
        }
    }
    std::sort(classes.begin(), classes.end(), [](const CriticalClass& a, const CriticalClass& b) {
        return a.representative.label < b.representative.label;
    });
    return classes;
}

} // namespace morseflow
