#include "morseflow/continuation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace morseflow {

const CriticalPoint* SceneData::find(const std::string& label) const {
    for (const auto& c : crits)
        if (c.label == label) return &c;
    return nullptr;
}

SceneData build_scene_data(const ManifoldModel& m, const ScalarField& f, const ModuliParams& prm,
                           const SearchParams& sp) {
    SceneData sd;
    sd.model = &m;
    sd.field = f;
    sd.metric = m.metric();
    sd.crits = find_critical_points(f, m, sp).points;
    for (const auto& c : sd.crits)
        if (c.degenerate)
            throw MorseViolation("degenerate critical point " + c.label + " in scene " + f.name());
    std::vector<PairCount> pairs;
    std::map<std::string, CircleScan> scans;
    for (const auto& up : sd.crits) {
        if (up.morse_index == 2) {
            ModuliParams p2 = prm;
            scans[up.label] = scan_unstable_circle(m, f, sd.crits, up, p2);
        }
    }
    for (const auto& up : sd.crits) {
        for (const auto& dn : sd.crits) {
            if (up.morse_index != dn.morse_index + 1) continue;
            const CircleScan* cached =
                scans.count(up.label) ? &scans.at(up.label) : nullptr;
            pairs.push_back(
                count_flow_lines(m, f, sd.crits, up, dn, prm, cached).as_pair());
        }
    }
    sd.complex = build_complex(sd.crits, pairs);
    sd.homol = homology(sd.complex);
    return sd;
}

// ------------------------------------------------------------------ homotopy

double Homotopy::beta(double s) const {
    const double t = (s + T) / (2.0 * T);
    return beta_raw ? beta_raw(t) : smoothstep5(t);
}

double Homotopy::f_at(double s, const Vec& p) const {
    const double b = beta(s);
    return b * f_plus.value(p) + (1.0 - b) * f_minus.value(p);
}

Vec Homotopy::ambient_grad_at(double s, const Vec& p) const {
    const double b = beta(s);
    if (b == 0.0) return f_minus.ambient_gradient(p);
    if (b == 1.0) return f_plus.ambient_gradient(p);
    return b * f_plus.ambient_gradient(p) + (1.0 - b) * f_minus.ambient_gradient(p);
}

Mat Homotopy::metric_matrix_at(double s) const {
    const int d = model->dim();
    Mat gm = g_minus.kind == MetricKind::Explicit ? g_minus.matrix : Mat::Identity(d, d);
    Mat gp = g_plus.kind == MetricKind::Explicit ? g_plus.matrix : Mat::Identity(d, d);
    const double b = beta(s);
    return b * gp + (1.0 - b) * gm;
}

VelocityField Homotopy::field() const {
    const Homotopy* h = this;
    const ManifoldModel* m = model;
    const bool flat_metric_homotopy =
        !m->has_constraint() &&
        (g_minus.kind == MetricKind::Explicit || g_plus.kind == MetricKind::Explicit);
    return [h, m, flat_metric_homotopy](double s, const Vec& p) -> Vec {
        Vec df = h->ambient_grad_at(s, p);
        if (m->has_constraint()) return (-m->tangent_project(p, df)).eval();
        if (flat_metric_homotopy) return (-h->metric_matrix_at(s).ldlt().solve(df)).eval();
        return (-df).eval();
    };
}

Homotopy Homotopy::reversed() const {
    Homotopy r = *this;
    const ScalarField fm = f_minus, fp = f_plus;
    r.f_minus = ScalarField("neg_" + fp.name(), [fp](const Vec& p) { return -fp.value(p); })
                    .with_gradient([fp](const Vec& p) { return (-fp.ambient_gradient(p)).eval(); })
                    .with_hessian([fp](const Vec& p) { return (-fp.ambient_hessian(p)).eval(); });
    r.f_plus = ScalarField("neg_" + fm.name(), [fm](const Vec& p) { return -fm.value(p); })
                   .with_gradient([fm](const Vec& p) { return (-fm.ambient_gradient(p)).eval(); })
                   .with_hessian([fm](const Vec& p) { return (-fm.ambient_hessian(p)).eval(); });
    r.g_minus = g_plus;
    r.g_plus = g_minus;
    // time-reversed cutoff: beta_rev(t) = 1 - beta(1 - t)
    const auto braw = beta_raw;
    if (braw)
        r.beta_raw = [braw](double t) { return 1.0 - braw(1.0 - t); };
    return r;
}

// ------------------------------------------------- continuation trajectories

namespace {

struct ContinuationOutcome {
    std::string endpoint;
    std::map<std::string, int> sides;        // per index-1 target passage side
    std::map<std::string, double> pass_dist; // closest approach per index-1 target
    FlowLine line;
};

Vec nearest_rep(const ManifoldModel& m, const Vec& c, const Vec& near) {
    if (m.kind() != ModelKind::FlatTorus) return c;
    Vec r = c;
    for (int i = 0; i < c.size(); ++i) r[i] = c[i] + std::round(near[i] - c[i]);
    return r;
}

// Launch from 'start' at s = -T, ride the homotopy window, then flow the
// autonomous f_+ until capture against the target scene's critical points.
ContinuationOutcome run_continuation(const Homotopy& h, const SceneData& to, const Vec& start,
                                     const ContinuationParams& prm) {
    const ManifoldModel& m = *h.model;
    ContinuationOutcome out;
    FlowLine line;
    IntegrateOptions opts;
    opts.s_begin = -h.T;
    integrate_field(m, h.field(), start, -h.T, h.T, nullptr, opts, line, nullptr);

    // autonomous settling under f_+ with capture
    StopRule stop = prm.moduli.stop;
    stop.crits = &to.crits;
    VelocityField fplus = [&h, &m](double, const Vec& q) -> Vec {
        Vec df = h.f_plus.ambient_gradient(q);
        if (m.has_constraint()) return (-m.tangent_project(q, df)).eval();
        if (h.g_plus.kind == MetricKind::Explicit)
            return (-h.g_plus.matrix.ldlt().solve(df)).eval();
        return (-df).eval();
    };
    FlowLine tail;
    tail.energy = line.energy;
    IntegrateOptions o2;
    o2.s_begin = h.T;
    integrate_field(m, fplus, line.samples.back().p, h.T, h.T + stop.s_max, &stop, o2, tail,
                    nullptr);
    if (tail.target) out.endpoint = *tail.target;
    out.line = std::move(line);
    for (size_t i = 1; i < tail.samples.size(); ++i)
        out.line.samples.push_back(std::move(tail.samples[i]));
    out.line.energy = tail.energy;
    // passage sides at the target scene's index-1 points
    for (const auto& c : to.crits) {
        if (c.morse_index != 1) continue;
        double best = std::numeric_limits<double>::infinity();
        Vec at;
        for (const auto& smp : out.line.samples) {
            if (smp.s < h.T) continue;
            const double d = m.distance(smp.p, c.location);
            if (d < best) {
                best = d;
                at = smp.p;
            }
        }
        out.pass_dist[c.label] = best;
        int side = 0;
        if (best < prm.moduli.r_near && at.size()) {
            Mat basis = negative_eigenbasis(to.field, m, c);
            Vec dir = basis.col(0);
            if (m.has_constraint()) dir = m.tangent_frame(c.location) * dir;
            Vec rep = nearest_rep(m, c.location, at);
            side = (at - rep).dot(dir) >= 0.0 ? 1 : -1;
        }
        out.sides[c.label] = side;
    }
    return out;
}

bool same_outcome(const ContinuationOutcome& a, const ContinuationOutcome& b) {
    if (a.endpoint != b.endpoint) return false;
    for (const auto& [label, sa] : a.sides) {
        const int sb = b.sides.at(label);
        if (sa != 0 && sb != 0 && sa != sb) return false;
    }
    return true;
}

} // namespace

ModuliCount count_continuation_lines(const Homotopy& h, const SceneData& from, const SceneData& to,
                                     const CriticalPoint& c1, const CriticalPoint& c2,
                                     const ContinuationParams& prm) {
    if (c1.morse_index != c2.morse_index)
        throw Error("continuation counting requires equal Morse indices");
    const ManifoldModel& m = *h.model;
    const int n = m.dim();
    const int mu = c1.morse_index;
    ModuliCount mc;
    mc.source = c1.label;
    mc.target = c2.label;
    mc.method = "shooting-bisection";

    if (mu == 0) {
        ContinuationOutcome oc = run_continuation(h, to, c1.location, prm);
        if (oc.endpoint == c2.label) {
            mc.count = 1;
            oc.line.source = c1.label;
            oc.line.target = oc.endpoint;
            mc.witnesses.push_back(std::move(oc.line));
        }
        mc.count_mod2 = int(mc.count % 2);
        return mc;
    }
    if (mu == n) {
        // count via the time-reversed homotopy, where c2 has index zero
        Homotopy hr = h.reversed();
        ContinuationOutcome oc = run_continuation(hr, from, c2.location, prm);
        if (oc.endpoint == c1.label) {
            mc.count = 1;
            oc.line.source = c1.label;
            oc.line.target = c2.label;
            mc.witnesses.push_back(std::move(oc.line));
        }
        mc.count_mod2 = int(mc.count % 2);
        return mc;
    }

    // 0 < mu < n: scan the local unstable curve at the window start.
    Mat basis = negative_eigenbasis(from.field, m, c1);
    std::vector<double> offsets;
    const int half = prm.n_offsets;
    offsets.reserve(size_t(2 * half + 1));
    for (int i = half - 1; i >= 0; --i)
        offsets.push_back(-prm.offset_min *
                          std::pow(prm.offset_max / prm.offset_min, double(i) / double(half - 1)));
    offsets.push_back(0.0);
    for (int i = 0; i < half; ++i)
        offsets.push_back(prm.offset_min *
                          std::pow(prm.offset_max / prm.offset_min, double(i) / double(half - 1)));

    auto at_offset = [&](double a) {
        Vec start = c1.location;
        if (a != 0.0) start = unstable_seed(m, from.field, c1, basis.col(0), a);
        return run_continuation(h, to, start, prm);
    };

    std::vector<ContinuationOutcome> grid(offsets.size());
    int unresolved = 0;
    for (size_t i = 0; i < offsets.size(); ++i) {
        grid[i] = at_offset(offsets[i]);
        if (grid[i].endpoint.empty()) ++unresolved;
    }
    if (double(unresolved) > prm.moduli.unresolved_abort_fraction * double(offsets.size()))
        throw NonGenericWarning("unresolved continuation trajectories from " + c1.label);

    long count = 0;
    std::vector<FlowLine> witnesses;
    // direct grid hits (e.g. the constant solution of a trivial homotopy)
    std::vector<size_t> hit_indices;
    for (size_t i = 0; i < offsets.size(); ++i)
        if (grid[i].endpoint == c2.label) hit_indices.push_back(i);
    // collapse contiguous runs of direct hits into single events
    for (size_t k = 0; k < hit_indices.size(); ++k) {
        if (k > 0 && hit_indices[k] == hit_indices[k - 1] + 1) continue;
        ++count;
        FlowLine w = grid[hit_indices[k]].line;
        w.source = c1.label;
        w.target = c2.label;
        witnesses.push_back(std::move(w));
    }
    // bracketed events refined by bisection (geometric inside one sign, so the
    // log-spaced offsets keep relative precision)
    auto midpoint = [](double lo, double hi) {
        if (lo > 0.0 && hi > 0.0) return std::sqrt(lo * hi);
        if (lo < 0.0 && hi < 0.0) return -std::sqrt(lo * hi);
        return 0.5 * (lo + hi);
    };
    const bool saddle_target = c2.morse_index >= 1;
    auto is_event = [&](const ContinuationOutcome& oc) {
        if (oc.endpoint == c2.label) return true;
        if (saddle_target && oc.pass_dist.count(c2.label) &&
            oc.pass_dist.at(c2.label) < prm.moduli.witness_eps)
            return true;
        return false;
    };
    for (size_t i = 0; i + 1 < offsets.size(); ++i) {
        if (grid[i].endpoint == c2.label || grid[i + 1].endpoint == c2.label)
            continue; // adjacent to a direct hit
        if (same_outcome(grid[i], grid[i + 1])) continue;
        double lo = offsets[i], hi = offsets[i + 1];
        ContinuationOutcome cl = grid[i];
        ContinuationOutcome boundary;
        bool have_boundary = false;
        for (int d = 0; d < prm.moduli.bisect_depth; ++d) {
            const double mid = midpoint(lo, hi);
            if (mid <= lo || mid >= hi) break;
            ContinuationOutcome cm = at_offset(mid);
            if (cm.endpoint == c2.label) {
                boundary = cm;
                have_boundary = true;
                break;
            }
            if (same_outcome(cl, cm)) {
                lo = mid;
                cl = cm;
            } else {
                hi = mid;
            }
        }
        if (!have_boundary) boundary = at_offset(midpoint(lo, hi));
        if (is_event(boundary)) {
            ++count;
            boundary.line.source = c1.label;
            boundary.line.target = c2.label;
            witnesses.push_back(std::move(boundary.line));
        }
    }
    mc.count = count;
    mc.count_mod2 = int(count % 2);
    mc.witnesses = std::move(witnesses);
    return mc;
}

ChainMapGF2 chain_map(const Homotopy& h, const SceneData& from, const SceneData& to,
                      const ContinuationParams& prm) {
    ChainMapGF2 cm;
    const int maxk = std::max(from.complex.max_degree(), to.complex.max_degree());
    cm.phi.resize(size_t(maxk) + 1);
    for (int k = 0; k <= maxk; ++k) cm.phi[size_t(k)] = BitMatrix(to.complex.dim(k), from.complex.dim(k));
    for (const auto& c1 : from.crits) {
        for (const auto& c2 : to.crits) {
            if (c1.morse_index != c2.morse_index) continue;
            ModuliCount mc = count_continuation_lines(h, from, to, c1, c2, prm);
            const int k = c1.morse_index;
            const int col = from.complex.generator_index(k, c1.label);
            const int row = to.complex.generator_index(k, c2.label);
            cm.phi[size_t(k)].set(row, col, mc.count_mod2 != 0);
            cm.counts.push_back(std::move(mc));
        }
    }
    // chain identity: boundary_+ . phi_k = phi_{k-1} . boundary_-
    cm.chain_identity_ok = true;
    for (int k = 1; k <= maxk; ++k) {
        if (from.complex.dim(k) == 0) continue;
        BitMatrix lhs = to.complex.boundary[size_t(k)].multiply(cm.phi[size_t(k)]);
        BitMatrix rhs = cm.phi[size_t(k) - 1].multiply(from.complex.boundary[size_t(k)]);
        if (!(lhs == rhs)) {
            cm.chain_identity_ok = false;
            cm.failing_degree = k;
        }
    }
    if (!cm.chain_identity_ok)
        throw ChainIdentityFailure("chain identity fails at degree " +
                                   std::to_string(cm.failing_degree));
    return cm;
}

InducedMap induced_map(const ChainMapGF2& phi, const SceneData& from, const SceneData& to) {
    InducedMap im;
    const int maxk = int(phi.phi.size()) - 1;
    im.matrix.resize(size_t(maxk) + 1);
    im.iso = true;
    for (int k = 0; k <= maxk; ++k) {
        const auto& reps_from = from.homol.representatives.size() > size_t(k)
                                    ? from.homol.representatives[size_t(k)]
                                    : std::vector<BitVec>{};
        const auto& reps_to = to.homol.representatives.size() > size_t(k)
                                  ? to.homol.representatives[size_t(k)]
                                  : std::vector<BitVec>{};
        BitMatrix M(int(reps_to.size()), int(reps_from.size()));
        // express phi(rep) in the target homology basis
        std::vector<BitVec> img;
        if (k + 1 <= to.complex.max_degree()) img = to.complex.boundary[size_t(k) + 1].image_basis();
        const int nk = to.complex.dim(k);
        BitMatrix solve_mat(nk, int(reps_to.size()) + int(img.size()));
        for (size_t j = 0; j < reps_to.size(); ++j)
            for (int i = 0; i < nk; ++i) solve_mat.set(i, int(j), reps_to[j].get(i));
        for (size_t j = 0; j < img.size(); ++j)
            for (int i = 0; i < nk; ++i)
                solve_mat.set(i, int(reps_to.size() + j), img[j].get(i));
        for (size_t j = 0; j < reps_from.size(); ++j) {
            BitVec v(from.complex.dim(k));
            v = reps_from[j];
            BitVec w = phi.phi[size_t(k)].apply(v);
            BitVec x;
            if (!solve_mat.solve(w, x))
                throw Error("chain image does not represent a homology class");
            for (size_t i = 0; i < reps_to.size(); ++i) M.set(int(i), int(j), x.get(int(i)));
        }
        if (int(reps_from.size()) != int(reps_to.size()) ||
            M.rank() != int(reps_from.size()))
            im.iso = im.iso && reps_from.empty() && reps_to.empty();
        im.matrix[size_t(k)] = std::move(M);
    }
    return im;
}

InducedMap compose(const InducedMap& b, const InducedMap& a) {
    InducedMap out;
    const size_t K = std::min(a.matrix.size(), b.matrix.size());
    out.matrix.resize(K);
    out.iso = a.iso && b.iso;
    for (size_t k = 0; k < K; ++k) out.matrix[k] = b.matrix[k].multiply(a.matrix[k]);
    return out;
}

double c0_distance(const ManifoldModel& m, const ScalarField& a, const ScalarField& b,
                   int samples) {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        Vec u = halton_point(std::uint64_t(k), m.ambient_dim());
        Vec p = m.box_lo() + u.cwiseProduct(m.box_hi() - m.box_lo());
        if (m.has_constraint()) {
            try {
                p = m.retract(p, Vec::Zero(3));
            } catch (const Error&) {
                continue;
            }
        }
        worst = std::max(worst, std::abs(a.value(p) - b.value(p)));
    }
    return worst * 1.01; // sampling safety margin
}

double c0_norm(const ManifoldModel& m, const ScalarField& a, int samples) {
    ScalarField zero("zero", [](const Vec&) { return 0.0; });
    return c0_distance(m, a, zero, samples);
}

EnergyBoundReport energy_bound_check(const Homotopy& h, const std::vector<ModuliCount>& counts,
                                     const SceneData& from, const SceneData& to,
                                     double tau_energy) {
    EnergyBoundReport rep;
    const ManifoldModel& m = *h.model;
    // sup norms by dense sampling
    ScalarField diff("diff", [&](const Vec& p) { return h.f_plus.value(p) - h.f_minus.value(p); });
    ScalarField zero("zero", [](const Vec&) { return 0.0; });
    double sup_diff = 0.0, max_diff_signed = -std::numeric_limits<double>::infinity();
    {
        for (int k = 0; k < 100000; ++k) {
            Vec u = halton_point(std::uint64_t(k), m.ambient_dim());
            Vec p = m.box_lo() + u.cwiseProduct(m.box_hi() - m.box_lo());
            if (m.has_constraint()) {
                try {
                    p = m.retract(p, Vec::Zero(3));
                } catch (const Error&) {
                    continue;
                }
            }
            const double d = diff.value(p);
            sup_diff = std::max(sup_diff, std::abs(d));
            max_diff_signed = std::max(max_diff_signed, d);
        }
        sup_diff *= 1.01;
        max_diff_signed = max_diff_signed + 0.01 * sup_diff;
    }
    rep.sup_fplus_minus_fminus = max_diff_signed;
    const double norm_minus = c0_norm(m, h.f_minus, 20000);
    const double norm_plus = c0_norm(m, h.f_plus, 20000);
    // |beta'| <= 15/(16 T) for the quintic smoothstep on [-T, T]
    const double sup_dsf = 15.0 / (16.0 * h.T) * sup_diff;
    const double energy_budget = norm_minus + norm_plus + 2.0 * h.T * sup_dsf;

    for (const auto& mc : counts) {
        const CriticalPoint* c1 = from.find(mc.source);
        const CriticalPoint* c2 = to.find(mc.target);
        if (!c1 || !c2) continue;
        for (const auto& w : mc.witnesses) {
            ++rep.checked;
            const double action_slack =
                c2->value - (c1->value + max_diff_signed) - tau_energy * (1.0 + std::abs(c2->value));
            rep.worst_action_slack = std::max(rep.worst_action_slack, action_slack);
            if (action_slack > 0.0) {
                rep.ok = false;
                throw BoundViolation("continuation witness " + mc.source + " -> " + mc.target +
                                     " violates the action estimate");
            }
            const double energy_slack =
                w.energy - energy_budget - tau_energy * (1.0 + std::abs(w.energy));
            rep.worst_energy_slack = std::max(rep.worst_energy_slack, energy_slack);
            if (energy_slack > 0.0) {
                rep.ok = false;
                throw BoundViolation("continuation witness " + mc.source + " -> " + mc.target +
                                     " exceeds the uniform energy bound");
            }
        }
    }
    return rep;
}

LipschitzReport spectral_lipschitz_check(const SceneData& from, const SceneData& to,
                                         const InducedMap& Phi, int c0_samples) {
    LipschitzReport rep;
    rep.c0_distance = c0_distance(*from.model, from.field, to.field, c0_samples);
    for (int k = 0; k < int(Phi.matrix.size()); ++k) {
        const auto& reps_from = from.homol.representatives[size_t(k)];
        const auto& reps_to = to.homol.representatives[size_t(k)];
        for (size_t j = 0; j < reps_from.size(); ++j) {
            const double sig_from = spectral_number(from.complex, k, reps_from[j]);
            // image class: combine target representatives per the induced matrix
            BitVec img(to.complex.dim(k));
            bool nonzero = false;
            for (size_t i = 0; i < reps_to.size(); ++i) {
                if (Phi.matrix[size_t(k)].get(int(i), int(j))) {
                    img ^= reps_to[i];
                    nonzero = true;
                }
            }
            if (!nonzero) continue;
            const double sig_to = spectral_number(to.complex, k, img);
            LipschitzReport::Entry e;
            e.degree = k;
            e.sigma_from = sig_from;
            e.sigma_to = sig_to;
            e.bound = rep.c0_distance;
            e.slack = e.bound - std::abs(sig_to - sig_from);
            e.ok = e.slack >= -1e-9;
            rep.all_ok = rep.all_ok && e.ok;
            rep.entries.push_back(e);
        }
    }
    return rep;
}

ExtensionResult spectral_extend(const std::vector<SceneData>& members,
                                const ScalarField& degenerate_limit, const ManifoldModel& m,
                                const ContinuationParams& prm, double tau) {
    if (members.size() < 2) throw Error("extension needs at least two members");
    ExtensionResult out;
    // continuation maps along the sequence
    std::vector<InducedMap> steps;
    for (size_t j = 0; j + 1 < members.size(); ++j) {
        Homotopy h;
        h.model = &m;
        h.f_minus = members[j].field;
        h.f_plus = members[j + 1].field;
        h.g_minus = members[j].metric;
        h.g_plus = members[j + 1].metric;
        ChainMapGF2 phi = chain_map(h, members[j], members[j + 1], prm);
        steps.push_back(induced_map(phi, members[j], members[j + 1]));
        out.member_c0_steps.push_back(
            c0_distance(m, members[j].field, members[j + 1].field, 40000));
    }
    // critical values of the degenerate limit (degenerate points included)
    std::vector<double> limit_spectrum;
    {
        auto crits = find_critical_points(degenerate_limit, m).points;
        limit_spectrum = spectrum(crits);
    }
    // trace each homology class of the first member forward
    for (int k = 0; k <= members.front().complex.max_degree(); ++k) {
        const auto& reps0 = members.front().homol.representatives[size_t(k)];
        for (size_t j0 = 0; j0 < reps0.size(); ++j0) {
            ExtensionTrace tr;
            tr.degree = k;
            tr.class_index = int(j0);
            // coefficient vector in the homology basis, transported stepwise
            BitVec coeff(int(reps0.size()));
            coeff.set(int(j0), true);
            tr.values.push_back(spectral_number(members.front().complex, k, reps0[j0]));
            BitVec cur = coeff;
            for (size_t step = 0; step < steps.size(); ++step) {
                const auto& M = steps[step].matrix[size_t(k)];
                BitVec next(M.rows());
                for (int i = 0; i < M.rows(); ++i) {
                    int par = 0;
                    for (int jj = 0; jj < M.cols(); ++jj)
                        par ^= int(M.get(i, jj) & cur.get(jj));
                    next.set(i, par);
                }
                cur = next;
                // chain representative of the transported class
                const auto& reps = members[step + 1].homol.representatives[size_t(k)];
                BitVec rep_vec(members[step + 1].complex.dim(k));
                bool nonzero = false;
                for (int i = 0; i < int(reps.size()); ++i) {
                    if (cur.get(i)) {
                        rep_vec ^= reps[size_t(i)];
                        nonzero = true;
                    }
                }
                if (!nonzero) throw Error("class died along the continuation sequence");
                tr.values.push_back(spectral_number(members[step + 1].complex, k, rep_vec));
            }
            for (size_t j = 0; j + 1 < tr.values.size(); ++j) {
                if (std::abs(tr.values[j + 1] - tr.values[j]) > out.member_c0_steps[j] + tau)
                    out.cauchy_ok = false;
            }
            if (!out.cauchy_ok)
                throw NotCauchy("spectral values drift beyond the C0 distance between members");
            tr.limit = tr.values.back();
            double best = std::numeric_limits<double>::infinity();
            double at = 0.0;
            for (double v : limit_spectrum) {
                if (std::abs(v - tr.limit) < best) {
                    best = std::abs(v - tr.limit);
                    at = v;
                }
            }
            tr.nearest_critical_value = at;
            tr.distance_to_spectrum = best;
            out.traces.push_back(std::move(tr));
        }
    }
    return out;
}

} // namespace morseflow
