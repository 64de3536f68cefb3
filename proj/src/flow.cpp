#include "morseflow/flow.hpp"

#include <algorithm>
#include <cmath>

namespace morseflow {

VelocityField gradient_flow_field(const ScalarField& f, const ManifoldModel& m, bool backward) {
    const double sign = backward ? 1.0 : -1.0;
    return [&f, &m, sign](double, const Vec& p) -> Vec {
        return sign * riemannian_gradient(f, m, p);
    };
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct CaptureHit {
    int index;
    double dist;
};

std::optional<CaptureHit> check_capture(const ManifoldModel& m, const ScalarField& f,
                                        const Vec& p, const StopRule& stop) {
    if (!stop.crits) return std::nullopt;
    for (size_t i = 0; i < stop.crits->size(); ++i) {
        const double d = m.distance(p, (*stop.crits)[i].location);
        if (d < stop.eps_capture && gradient_norm(f, m, p) < stop.grad_capture)
            return CaptureHit{int(i), d};
    }
    return std::nullopt;
}

} // namespace

void integrate_field(const ManifoldModel& m, const VelocityField& field, Vec p,
                     double s_begin, double s_end, const StopRule* stop,
                     const IntegrateOptions& opts, FlowLine& line,
                     const ScalarField* monotone_of) {
    double s = s_begin;
    double h = std::min(opts.h_init, s_end - s_begin);
    Vec v = field(s, p);
    double energy_acc = line.energy;
    double last_f = monotone_of ? monotone_of->value(p) : 0.0;
    if (line.samples.empty() || line.samples.back().s < s)
        line.samples.push_back({s, p, v});

    auto gnorm2 = [&](const Vec& q, const Vec& vel) { return m.inner(q, vel, vel); };

    Vec k1, k2, k3, k4, k5, k6, k7;
    while (s < s_end - 1e-14) {
        h = std::min(h, s_end - s);
        // retraction precondition: bound the spatial step length
        const double speed = v.norm();
        if (speed * h > m.tol.h_max) h = m.tol.h_max / speed;

        k1 = v;
        bool bad = false;
        Vec y2, y3, y4, y5, y6, ynew;
        try {
            k2 = field(s + c2 * h, p + h * (a21 * k1));
            k3 = field(s + c3 * h, p + h * (a31 * k1 + a32 * k2));
            k4 = field(s + c4 * h, p + h * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = field(s + c5 * h, p + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = field(s + h, p + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            ynew = p + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = field(s + h, ynew);
            bad = !ynew.allFinite();
        } catch (const Error&) {
            bad = true;
        }
        if (bad) {
            h *= 0.5;
            if (h < opts.h_min) throw StepCollapse("adaptive step collapsed");
            continue;
        }
        Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = 0.0;
        for (int i = 0; i < p.size(); ++i) {
            const double sc = opts.atol + opts.rtol * std::max(std::abs(p[i]), std::abs(ynew[i]));
            en += sq(err[i] / sc);
        }
        en = std::sqrt(en / double(p.size()));
        if (en > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            if (h < opts.h_min) throw StepCollapse("adaptive step collapsed");
            continue;
        }
        // accept
        // energy quadrature with the same stage weights
        energy_acc += h * (b1 * gnorm2(p, k1) + b3 * gnorm2(p, k3) + b4 * gnorm2(p, k4) +
                           b5 * gnorm2(p, k5) + b6 * gnorm2(p, k6));
        Vec before = ynew;
        if (m.has_constraint()) ynew = m.retract(ynew, Vec::Zero(3));
        if (m.kind() == ModelKind::RealLine &&
            (ynew[0] <= m.interval_lo() || ynew[0] >= m.interval_hi()))
            throw EscapedDomain("trajectory left the interval domain");
        s += h;
        p = ynew;
        v = field(s, p);
        if (opts.record) line.samples.push_back({s, p, v});
        if (monotone_of) {
            const double fv = monotone_of->value(p);
            line.monotone_violation = std::max(line.monotone_violation, fv - last_f);
            last_f = fv;
        }
        if (stop) {
            // capture test against the listed critical points
            if (stop->crits) {
                for (size_t i = 0; i < stop->crits->size(); ++i) {
                    if (m.distance(p, (*stop->crits)[i].location) < stop->eps_capture &&
                        v.norm() < stop->grad_capture) {
                        line.target = (*stop->crits)[i].label;
                        line.energy = energy_acc;
                        return;
                    }
                }
            }
        }
        if (en > 1e-30) h *= std::min(5.0, 0.9 * std::pow(en, -0.2));
    }
    line.energy = energy_acc;
}

FlowLine integrate(const ManifoldModel& m, const ScalarField& f, const Vec& start,
                   const StopRule& stop, const IntegrateOptions& opts) {
    FlowLine line;
    VelocityField field = gradient_flow_field(f, m, opts.backward);
    // immediate capture: starting inside a capture ball
    if (auto hit = check_capture(m, f, start, stop)) {
        line.samples.push_back({opts.s_begin, start, field(opts.s_begin, start)});
        line.target = (*stop.crits)[hit->index].label;
        return line;
    }
    integrate_field(m, field, start, opts.s_begin, opts.s_begin + stop.s_max, &stop, opts, line,
                    opts.backward ? nullptr : &f);
    return line;
}

// --------------------------------------------------------------- sampling

namespace {

// Hermite basis on [0,1].
inline void hermite_weights(double t, double h, double& h00, double& h10, double& h01,
                            double& h11) {
    const double t2 = t * t, t3 = t2 * t;
    h00 = 2 * t3 - 3 * t2 + 1;
    h10 = h * (t3 - 2 * t2 + t);
    h01 = -2 * t3 + 3 * t2;
    h11 = h * (t3 - t2);
}

size_t locate(const FlowLine& line, double s) {
    const auto& S = line.samples;
    size_t lo = 0, hi = S.size() - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (S[mid].s <= s)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace

Vec eval_line(const FlowLine& line, double s) {
    const auto& S = line.samples;
    if (S.empty()) throw Error("empty flow line");
    if (s <= S.front().s) return S.front().p;
    if (s >= S.back().s) return S.back().p;
    const size_t i = locate(line, s);
    const double h = S[i + 1].s - S[i].s;
    const double t = (s - S[i].s) / h;
    double h00, h10, h01, h11;
    hermite_weights(t, h, h00, h10, h01, h11);
    return h00 * S[i].p + h10 * S[i].v + h01 * S[i + 1].p + h11 * S[i + 1].v;
}

Vec eval_line_velocity(const FlowLine& line, double s) {
    const auto& S = line.samples;
    if (S.empty()) throw Error("empty flow line");
    if (s <= S.front().s) return S.front().v;
    if (s >= S.back().s) return S.back().v;
    const size_t i = locate(line, s);
    const double h = S[i + 1].s - S[i].s;
    const double t = (s - S[i].s) / h;
    const double d00 = (6 * t * t - 6 * t) / h;
    const double d10 = 3 * t * t - 4 * t + 1;
    const double d01 = (-6 * t * t + 6 * t) / h;
    const double d11 = 3 * t * t - 2 * t;
    return d00 * S[i].p + d10 * S[i].v + d01 * S[i + 1].p + d11 * S[i + 1].v;
}

double energy(const FlowLine& line, const ManifoldModel& m) {
    const auto& S = line.samples;
    if (S.size() < 2) return 0.0;
    // 3-point Gauss per interval on the Hermite reconstruction
    static const double gx[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
    static const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    double E = 0.0;
    for (size_t i = 0; i + 1 < S.size(); ++i) {
        const double h = S[i + 1].s - S[i].s;
        double acc = 0.0;
        for (int g = 0; g < 3; ++g) {
            const double t = gx[g];
            const double d00 = (6 * t * t - 6 * t) / h;
            const double d10 = 3 * t * t - 4 * t + 1;
            const double d01 = (-6 * t * t + 6 * t) / h;
            const double d11 = 3 * t * t - 2 * t;
            Vec v = d00 * S[i].p + d10 * S[i].v + d01 * S[i + 1].p + d11 * S[i + 1].v;
            double h00, h10, h01, h11;
            hermite_weights(t, h, h00, h10, h01, h11);
            Vec p = h00 * S[i].p + h10 * S[i].v + h01 * S[i + 1].p + h11 * S[i + 1].v;
            acc += gw[g] * m.inner(p, v, v);
        }
        E += h * acc;
    }
    return E;
}

DecayFit decay_rate(const FlowLine& line, const ManifoldModel& m, const CriticalPoint& target,
                    double tail_fraction) {
    const auto& S = line.samples;
    if (S.size() < 25) throw InsufficientTail("too few samples for a decay fit");
    const double s_end = S.back().s, s_begin = S.front().s;
    double s_cut = s_end - tail_fraction * (s_end - s_begin);
    auto collect = [&](double cut, std::vector<double>& xs, std::vector<double>& ys) {
        xs.clear();
        ys.clear();
        for (const auto& smp : S) {
            if (smp.s < cut) continue;
            const double d = m.distance(smp.p, target.location);
            if (d < 1e-13 || d > 0.05) continue;
            xs.push_back(smp.s);
            ys.push_back(std::log(d));
        }
    };
    std::vector<double> xs, ys;
    collect(s_cut, xs, ys);
    // smooth flows may cross the capture ball in few steps; widen to the
    // whole linear-regime window before giving up
    if (xs.size() < 20) collect(s_begin, xs, ys);
    if (xs.size() < 20) throw InsufficientTail("resolved tail shorter than 20 samples");
    // least squares line fit
    const double n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double rss = 0;
    for (size_t i = 0; i < xs.size(); ++i) rss += sq(ys[i] - slope * xs[i] - icept);
    DecayFit fit;
    fit.rate = -slope;
    fit.residual = std::sqrt(rss / n);
    return fit;
}

KappaEstimate action_energy_kappa(const ScalarField& f, const ManifoldModel& m,
                                  const CriticalPoint& crit, double radius, int n_samples) {
    if (crit.degenerate) throw DegenerateCritical("kappa estimate at a degenerate critical point");
    KappaEstimate est;
    double min_abs_eig = std::numeric_limits<double>::infinity();
    for (double e : crit.hessian_eigenvalues) min_abs_eig = std::min(min_abs_eig, std::abs(e));
    // stated for f = <x, Ax> as 1/(2 min |a_i|); the metric Hessian is 2A, so
    // in Hessian eigenvalues the bound reads 1/min|h_i|
    est.paper_bound = 1.0 / min_abs_eig;
    const double f0 = crit.value;
    const int d = m.dim();
    Mat F = m.tangent_frame(crit.location);
    for (int k = 0; k < n_samples; ++k) {
        Vec u = halton_point(k, d);
        // radial-uniform sample of the punctured disk/segment
        Vec dir(d);
        if (d == 1) {
            dir[0] = u[0] < 0.5 ? -1.0 : 1.0;
        } else {
            const double th = 2.0 * M_PI * u[1];
            dir[0] = std::cos(th);
            dir[1] = std::sin(th);
        }
        const double r = radius * std::max(u[0], 1e-3);
        Vec step;
        if (m.has_constraint())
            step = F * (r * dir);
        else
            step = r * dir;
        Vec p;
        try {
            p = m.retract(crit.location, step);
        } catch (const Error&) {
            continue;
        }
        Vec g = riemannian_gradient(f, m, p);
        const double g2 = m.inner(p, g, g);
        if (g2 < 1e-30) continue;
        const double ratio = std::abs(f.value(p) - f0) / g2;
        est.kappa_hat = std::max(est.kappa_hat, ratio);
        ++est.samples;
    }
    return est;
}

// ----------------------------------------------------------------- preglue

namespace {

struct ChartCurve {
    std::vector<double> s;  // increasing
    std::vector<Vec> u;     // chart coordinates
    std::vector<Vec> du;    // chart velocities
    double rate = 1.0;      // asymptotic decay rate toward the critical point
    // Hermite evaluation with exponential extension of the asymptotic end
    Vec eval(double t, bool extend_right) const {
        if (s.empty()) return Vec();
        if (t <= s.front()) {
            if (!extend_right) return u.front() * std::exp(rate * (t - s.front()));
            return u.front();
        }
        if (t >= s.back()) {
            if (extend_right) return u.back() * std::exp(-rate * (t - s.back()));
            return u.back();
        }
        size_t lo = 0, hi = s.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            if (s[mid] <= t)
                lo = mid;
            else
                hi = mid;
        }
        const double h = s[lo + 1] - s[lo];
        const double w = (t - s[lo]) / h;
        const double w2 = w * w, w3 = w2 * w;
        return (2 * w3 - 3 * w2 + 1) * u[lo] + h * (w3 - 2 * w2 + w) * du[lo] +
               (-2 * w3 + 3 * w2) * u[lo + 1] + h * (w3 - w2) * du[lo + 1];
    }
};

// Nearest cover representative of c to a point (tori identify mod 1).
Vec cover_rep(const ManifoldModel& m, const Vec& c, const Vec& near) {
    if (m.kind() != ModelKind::FlatTorus) return c;
    Vec r = c;
    for (int i = 0; i < c.size(); ++i) r[i] = c[i] + std::round(near[i] - c[i]);
    return r;
}

} // namespace

PreglueResult preglue(const ManifoldModel& m, const ScalarField& f, const FlowLine& up,
                      const FlowLine& down, const CriticalPoint& c, double T,
                      const std::function<double(double)>& cutoff, double chart_radius) {
    auto beta = cutoff ? cutoff : [](double t) { return smoothstep5(t); };
    Mat F = m.tangent_frame(c.location);
    Mat H = metric_hessian_unchecked(f, m, c.location);

    // graph chart over the tangent plane at c: to_chart is the orthogonal
    // projection of the displacement, from_chart lifts back along the fixed
    // normal, so the two maps are exact inverses on the surface patch
    Vec normal = Vec();
    if (m.has_constraint()) {
        normal = m.constraint_gradient_checked(c.location);
        normal.normalize();
    }
    auto to_chart = [&](const Vec& p, const Vec& crep) -> Vec {
        if (m.has_constraint()) return F.transpose() * (p - crep);
        return p - crep;
    };
    auto from_chart = [&](const Vec& u) -> Vec {
        if (!m.has_constraint()) return m.retract(c.location, u);
        Vec base = c.location + F * u;
        double t = 0.0;
        for (int it = 0; it < m.tol.n_proj; ++it) {
            const Vec p = base + t * normal;
            const double g = m.constraint().value(p);
            if (std::abs(g) <= m.tol.tau_surf) return p;
            const double slope = m.constraint().grad(p).dot(normal);
            if (std::abs(slope) < m.tol.eps_reg)
                throw ChartOverflow("graph chart folds inside the requested radius");
            t -= g / slope;
        }
        throw ChartOverflow("graph chart lift did not converge");
    };
    // velocity of the projected curve: the projection is linear
    auto chart_pullback = [&](const Vec&, const Vec& v) -> Vec {
        if (!m.has_constraint()) return v;
        return F.transpose() * v;
    };
    auto rayleigh = [&](const Vec& u) {
        const double nn = u.squaredNorm();
        return nn < 1e-28 ? 1.0 : std::abs(u.dot(H * u)) / nn;
    };

    // 'up' flows into c: keep samples once inside the chart, time-shifted so
    // the curve lives on [0, infinity).
    ChartCurve U;
    {
        const Vec crep = cover_rep(m, c.location, up.samples.back().p);
        size_t first = up.samples.size();
        for (size_t i = 0; i < up.samples.size(); ++i) {
            if ((up.samples[i].p - crep).norm() <= chart_radius) {
                first = i;
                break;
            }
        }
        if (first == up.samples.size()) throw ChartOverflow("incoming line never enters the chart");
        const double s0 = up.samples[first].s;
        for (size_t i = first; i < up.samples.size(); ++i) {
            Vec u = to_chart(up.samples[i].p, crep);
            if (u.norm() > 2.0 * chart_radius)
                throw ChartOverflow("incoming line leaves the chart after entering");
            U.s.push_back(up.samples[i].s - s0);
            U.u.push_back(u);
            U.du.push_back(chart_pullback(u, up.samples[i].v));
        }
        U.rate = rayleigh(U.u.back());
    }

    // 'down' flows out of c: shift so the chart exit happens at time 0,
    // extending toward -infinity by the linearized tail.
    ChartCurve D;
    {
        const Vec crep = cover_rep(m, c.location, down.samples.front().p);
        size_t last = 0;
        bool any = false;
        for (size_t i = 0; i < down.samples.size(); ++i) {
            if ((down.samples[i].p - crep).norm() <= chart_radius) {
                last = i;
                any = true;
            } else if (any)
                break;
        }
        if (!any) throw ChartOverflow("outgoing line never inside the chart");
        const double s1 = down.samples[last].s;
        for (size_t i = 0; i <= last; ++i) {
            Vec u = to_chart(down.samples[i].p, crep);
            D.s.push_back(down.samples[i].s - s1);
            D.u.push_back(u);
            D.du.push_back(chart_pullback(u, down.samples[i].v));
        }
        D.rate = rayleigh(D.u.front());
    }

    PreglueResult out;
    const double hg = std::min(0.01, T / 400.0);
    const int n = int(std::ceil(2.0 * T / hg)) + 1;
    out.grid.resize(n);
    out.chart_path.resize(n);
    out.manifold_path.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = -T + 2.0 * T * double(i) / double(n - 1);
        const double w_up = 1.0 - beta(s + T / 2.0 + 1.0);
        const double w_dn = beta(s - T / 2.0);
        Vec z = Vec::Zero(m.dim());
        if (w_up != 0.0) z += w_up * U.eval(s + T, /*extend_right=*/true);
        if (w_dn != 0.0) z += w_dn * D.eval(s - T, /*extend_right=*/false);
        if (z.norm() > 2.0 * chart_radius) throw ChartOverflow("preglued path leaves the chart");
        out.grid[i] = s;
        out.chart_path[i] = z;
        out.manifold_path[i] = from_chart(z);
    }
    // residual of the chart path against the chart-expressed flow equation
    // z' = v_chart(z), where v_chart is the pullback of -grad_g f through the
    // normal chart u -> retract(c + F u)
    auto chart_velocity = [&](const Vec& u) -> Vec {
        const Vec p = from_chart(u);
        const Vec v = -riemannian_gradient(f, m, p);
        if (!m.has_constraint()) return v; // flat chart: identity Jacobian
        const double hj = 1e-6;
        Mat J(3, m.dim());
        for (int d = 0; d < m.dim(); ++d) {
            Vec e = Vec::Zero(m.dim());
            e[d] = hj;
            J.col(d) = (from_chart(u + e) - from_chart(u - e)) / (2.0 * hj);
        }
        return (J.transpose() * J).ldlt().solve(J.transpose() * v);
    };
    double worst = 0.0;
    out.residual_profile.assign(size_t(n), 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const double ds = out.grid[i + 1] - out.grid[i - 1];
        Vec dz = (out.chart_path[i + 1] - out.chart_path[i - 1]) / ds;
        Vec r = dz - chart_velocity(out.chart_path[i]);
        out.residual_profile[size_t(i)] = r.norm();
        worst = std::max(worst, r.norm());
    }
    out.residual = worst;
    return out;
}

} // namespace morseflow
