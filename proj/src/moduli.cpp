#include "morseflow/moduli.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace morseflow {

int ModuliScan::total_boundary_events() const {
    int n = 0;
    for (const auto& [label, k] : boundary_events) n += k;
    return n;
}

bool ModuliScan::events_even() const {
    for (const auto& [label, k] : boundary_events)
        if (k % 2 != 0) return false;
    return true;
}

Mat negative_eigenbasis(const ScalarField& f, const ManifoldModel& m, const CriticalPoint& c) {
    if (c.degenerate) throw DegenerateCritical("unstable basis of a degenerate point");
    Mat H = metric_hessian_unchecked(f, m, c.location);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    Mat basis(m.dim(), c.morse_index);
    int k = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()[i] < 0.0) basis.col(k++) = es.eigenvectors().col(i);
    }
    return basis;
}

Vec unstable_seed(const ManifoldModel& m, const ScalarField& f, const CriticalPoint& c,
                  const Vec& frame_direction, double delta) {
    if (c.degenerate) throw DegenerateCritical("unstable seed at a degenerate point");
    Vec step;
    if (m.has_constraint())
        step = m.tangent_frame(c.location) * (delta * frame_direction);
    else
        step = delta * frame_direction;
    (void)f;
    return m.retract(c.location, step);
}

namespace {

// Outcome of flowing one seed: target label plus close-passage data per
// index-1 point, used for side-of-saddle bracketing.
struct Passage {
    double min_dist = std::numeric_limits<double>::infinity();
    int side = 0; // sign of the unstable-direction component at closest approach
};

struct TrajectoryClass {
    std::string endpoint; // "" if unresolved
    std::map<std::string, Passage> passages;
    FlowLine line;
};

Vec nearest_rep(const ManifoldModel& m, const Vec& c, const Vec& near) {
    switch (m.kind()) {
    case ModelKind::FlatTorus: {
        Vec r = c;
        for (int i = 0; i < c.size(); ++i) r[i] = c[i] + std::round(near[i] - c[i]);
        return r;
    }
    case ModelKind::AntipodalQuotient:
        return (near - c).norm() <= (near + c).norm() ? c : Vec(-c);
    default:
        return c;
    }
}

struct SaddleInfo {
    const CriticalPoint* cp;
    Vec unstable_dir; // ambient (surface) or chart direction
};

TrajectoryClass classify_trajectory(const ManifoldModel& m, const ScalarField& f,
                                    const std::vector<CriticalPoint>& crits,
                                    const std::vector<SaddleInfo>& saddles, const Vec& seed,
                                    const ModuliParams& prm) {
    TrajectoryClass tc;
    StopRule stop = prm.stop;
    stop.crits = &crits;
    tc.line = integrate(m, f, seed, stop);
    if (tc.line.target) tc.endpoint = *tc.line.target;
    for (const auto& s : saddles) {
        Passage pass;
        Vec at_min;
        for (const auto& smp : tc.line.samples) {
            const double d = m.distance(smp.p, s.cp->location);
            if (d < pass.min_dist) {
                pass.min_dist = d;
                at_min = smp.p;
            }
        }
        if (pass.min_dist < prm.r_near) {
            Vec rep = nearest_rep(m, s.cp->location, at_min);
            const double comp = (at_min - rep).dot(s.unstable_dir);
            pass.side = comp >= 0.0 ? 1 : -1;
        }
        tc.passages[s.cp->label] = pass;
    }
    return tc;
}

// Two classifications agree when the endpoints match and every mutually close
// saddle passage exits on the same side.
bool same_class(const TrajectoryClass& a, const TrajectoryClass& b, double r_near) {
    if (a.endpoint != b.endpoint) return false;
    for (const auto& [label, pa] : a.passages) {
        const auto& pb = b.passages.at(label);
        if (pa.min_dist < r_near && pb.min_dist < r_near && pa.side != pb.side) return false;
    }
    return true;
}

std::vector<SaddleInfo> collect_saddles(const ManifoldModel& m, const ScalarField& f,
                                        const std::vector<CriticalPoint>& crits) {
    std::vector<SaddleInfo> out;
    for (const auto& c : crits) {
        if (c.degenerate || c.morse_index != 1) continue;
        Mat basis = negative_eigenbasis(f, m, c);
        Vec dir = basis.col(0);
        if (m.has_constraint()) dir = m.tangent_frame(c.location) * dir;
        out.push_back({&c, dir});
    }
    return out;
}

} // namespace

CircleScan scan_unstable_circle(const ManifoldModel& m, const ScalarField& f,
                                const std::vector<CriticalPoint>& crits,
                                const CriticalPoint& c_up, const ModuliParams& prm) {
    if (c_up.morse_index != 2 || c_up.degenerate)
        throw Error("circle scan requires a nondegenerate index-2 point");
    CircleScan scan;
    scan.source = c_up.label;
    Mat basis = negative_eigenbasis(f, m, c_up);
    const std::vector<SaddleInfo> saddles = collect_saddles(m, f, crits);

    auto at_angle = [&](double th) {
        Vec dir = std::cos(th) * basis.col(0) + std::sin(th) * basis.col(1);
        Vec seed = unstable_seed(m, f, c_up, dir, prm.delta_seed);
        return classify_trajectory(m, f, crits, saddles, seed, prm);
    };

    const int n = prm.n_scan;
    std::vector<TrajectoryClass> grid(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * double(i) / double(n);
        grid[size_t(i)] = at_angle(th);
        scan.angles.push_back(th);
        scan.endpoint_labels.push_back(grid[size_t(i)].endpoint);
        if (grid[size_t(i)].endpoint.empty()) ++scan.unresolved;
    }
    if (double(scan.unresolved) > prm.unresolved_abort_fraction * double(n))
        throw NonGenericWarning("unresolved trajectory fraction above 1% on the unstable circle of " +
                                c_up.label);

    // broken-limit witness run: strict capture misses a saddle the boundary
    // trajectory only shadows, so a dedicated ball verifies the first leg
    auto witness_at = [&](double th) -> TrajectoryClass {
        Vec dir = std::cos(th) * basis.col(0) + std::sin(th) * basis.col(1);
        Vec seed = unstable_seed(m, f, c_up, dir, prm.delta_seed);
        ModuliParams wp = prm;
        wp.stop.eps_capture = prm.witness_eps;
        wp.stop.grad_capture = prm.witness_grad;
        std::vector<CriticalPoint> index1;
        for (const auto& c : crits)
            if (!c.degenerate && c.morse_index == 1) index1.push_back(c);
        return classify_trajectory(m, f, index1, saddles, seed, wp);
    };
    auto index_of_label = [&](const std::string& label) -> int {
        for (const auto& c : crits)
            if (c.label == label) return c.morse_index;
        return -1;
    };

    // grid points whose trajectory terminates at a saddle ("direct hits"):
    // a contiguous run of them is one connecting line, flanked by its arcs
    std::vector<bool> hit(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i)
        hit[size_t(i)] = index_of_label(grid[size_t(i)].endpoint) == 1;

    std::vector<bool> visited(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        if (!hit[size_t(i)] || visited[size_t(i)]) continue;
        // expand the run circularly while the saddle label matches
        const std::string label = grid[size_t(i)].endpoint;
        int a = i;
        while (hit[size_t((a + n - 1) % n)] && !visited[size_t((a + n - 1) % n)] &&
               grid[size_t((a + n - 1) % n)].endpoint == label && (a + n - 1) % n != i)
            a = (a + n - 1) % n;
        int b = i;
        while (hit[size_t((b + 1) % n)] && grid[size_t((b + 1) % n)].endpoint == label &&
               (b + 1) % n != a)
            b = (b + 1) % n;
        for (int k = a;; k = (k + 1) % n) {
            visited[size_t(k)] = true;
            if (k == b) break;
        }
        ScanTransition tr;
        const double tha = 2.0 * M_PI * double(a) / double(n);
        double thb = 2.0 * M_PI * double(b) / double(n);
        if (thb < tha) thb += 2.0 * M_PI;
        tr.angle = std::fmod(0.5 * (tha + thb), 2.0 * M_PI);
        tr.saddle = label;
        tr.captured = true;
        tr.side_lo_label = grid[size_t((a + n - 1) % n)].endpoint;
        tr.side_hi_label = grid[size_t((b + 1) % n)].endpoint;
        scan.transitions.push_back(tr);
    }

    // refine every remaining bracket whose ends classify differently
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        if (hit[size_t(i)] || hit[size_t(j)]) continue;
        if (same_class(grid[size_t(i)], grid[size_t(j)], prm.r_near)) continue;
        double lo = 2.0 * M_PI * double(i) / double(n);
        double hi = 2.0 * M_PI * double(i + 1) / double(n);
        TrajectoryClass cl_lo = grid[size_t(i)];
        TrajectoryClass cl_hi = grid[size_t(j)];
        std::optional<TrajectoryClass> direct;
        double direct_angle = 0.0;
        for (int d = 0; d < prm.bisect_depth && hi - lo > 1e-15; ++d) {
            const double mid = 0.5 * (lo + hi);
            TrajectoryClass cm = at_angle(mid);
            if (index_of_label(cm.endpoint) == 1) {
                direct = cm;
                direct_angle = mid;
                break;
            }
            if (same_class(cl_lo, cm, prm.r_near)) {
                lo = mid;
                cl_lo = cm;
            } else {
                hi = mid;
                cl_hi = cm;
            }
        }
        ScanTransition tr;
        tr.side_lo_label = cl_lo.endpoint;
        tr.side_hi_label = cl_hi.endpoint;
        if (direct) {
            tr.angle = direct_angle;
            tr.saddle = direct->endpoint;
            tr.captured = true;
        } else {
            tr.angle = 0.5 * (lo + hi);
            TrajectoryClass boundary = witness_at(tr.angle);
            if (!boundary.endpoint.empty()) {
                tr.saddle = boundary.endpoint;
                tr.captured = true;
            } else {
                // fall back: the closest index-1 passage
                double best = std::numeric_limits<double>::infinity();
                for (const auto& [label, pass] : boundary.passages) {
                    if (pass.min_dist < best) {
                        best = pass.min_dist;
                        tr.saddle = label;
                    }
                }
            }
        }
        scan.transitions.push_back(tr);
    }
    std::sort(scan.transitions.begin(), scan.transitions.end(),
              [](const ScanTransition& a, const ScanTransition& b) { return a.angle < b.angle; });
    return scan;
}

ModuliCount count_flow_lines(const ManifoldModel& m, const ScalarField& f,
                             const std::vector<CriticalPoint>& crits, const CriticalPoint& c_up,
                             const CriticalPoint& c_down, const ModuliParams& prm,
                             const CircleScan* cached_scan) {
    if (c_up.degenerate || c_down.degenerate)
        throw DegenerateCritical("flow-line counting requires nondegenerate endpoints");
    if (c_up.morse_index != c_down.morse_index + 1)
        throw Error("flow-line counting requires index difference one");
    ModuliCount mc;
    mc.source = c_up.label;
    mc.target = c_down.label;

    if (c_up.morse_index == 1) {
        mc.method = "shooting-bisection";
        Mat basis = negative_eigenbasis(f, m, c_up);
        StopRule stop = prm.stop;
        stop.crits = &crits;
        for (double sign : {1.0, -1.0}) {
            Vec seed = unstable_seed(m, f, c_up, (sign * basis.col(0)).eval(), prm.delta_seed);
            FlowLine line = integrate(m, f, seed, stop);
            line.source = c_up.label;
            if (!line.target)
                throw NonGenericWarning("unresolved unstable trajectory of " + c_up.label);
            const auto it = std::find_if(crits.begin(), crits.end(), [&](const CriticalPoint& c) {
                return c.label == *line.target;
            });
            if (it != crits.end() && it->morse_index >= 1)
                throw NonGenericWarning("unstable trajectory of " + c_up.label +
                                        " captured at the index-" + std::to_string(it->morse_index) +
                                        " point " + it->label + " (suspected non-Morse-Smale data)");
            if (*line.target == c_down.label) {
                ++mc.count;
                mc.witnesses.push_back(std::move(line));
            }
        }
    } else if (c_up.morse_index == 2) {
        mc.method = "shooting-bisection";
        CircleScan local;
        const CircleScan* scan = cached_scan;
        if (!scan) {
            local = scan_unstable_circle(m, f, crits, c_up, prm);
            scan = &local;
        }
        std::vector<CriticalPoint> index1;
        for (const auto& c : crits)
            if (!c.degenerate && c.morse_index == 1) index1.push_back(c);
        for (const auto& tr : scan->transitions) {
            if (tr.saddle != c_down.label) continue;
            ++mc.count;
            // witness: re-flow the boundary angle; the shadowed saddle is
            // resolved inside the witness ball
            Mat basis = negative_eigenbasis(f, m, c_up);
            Vec dir = std::cos(tr.angle) * basis.col(0) + std::sin(tr.angle) * basis.col(1);
            Vec seed = unstable_seed(m, f, c_up, dir, prm.delta_seed);
            StopRule stop = prm.stop;
            stop.crits = &index1;
            stop.eps_capture = prm.witness_eps;
            stop.grad_capture = prm.witness_grad;
            FlowLine line = integrate(m, f, seed, stop);
            line.source = c_up.label;
            if (line.target && *line.target == c_down.label) mc.witnesses.push_back(std::move(line));
        }
    } else {
        throw Error("counting attempted for unsupported index difference setup");
    }
    mc.count_mod2 = int(mc.count % 2);
    return mc;
}

ModuliScan moduli_scan(const ManifoldModel& m, const ScalarField& f,
                       const std::vector<CriticalPoint>& crits, const CriticalPoint& c_up,
                       const CriticalPoint& c_bottom, const ModuliParams& prm,
                       const CircleScan* cached_scan) {
    if (c_up.morse_index - c_bottom.morse_index != 2)
        throw Error("moduli scan requires index difference two");
    CircleScan local;
    const CircleScan* scan = cached_scan;
    if (!scan) {
        local = scan_unstable_circle(m, f, crits, c_up, prm);
        scan = &local;
    }
    ModuliScan out;
    out.source = c_up.label;
    out.bottom = c_bottom.label;
    out.angles = scan->angles;
    out.endpoint_labels = scan->endpoint_labels;

    auto find_crit = [&](const std::string& label) -> const CriticalPoint* {
        for (const auto& c : crits)
            if (c.label == label) return &c;
        return nullptr;
    };

    for (ScanTransition tr : scan->transitions) {
        const CriticalPoint* saddle = find_crit(tr.saddle);
        if (!saddle || saddle->morse_index != 1 || !tr.captured)
            throw NonGenericWarning("transition at angle " + std::to_string(tr.angle) +
                                    " does not break through an index-1 point");
        // second legs: the saddle's unstable trajectories
        Mat basis = negative_eigenbasis(f, m, *saddle);
        StopRule stop = prm.stop;
        stop.crits = &crits;
        std::vector<std::string> leg_targets;
        for (double sign : {1.0, -1.0}) {
            Vec seed = unstable_seed(m, f, *saddle, (sign * basis.col(0)).eval(), prm.delta_seed);
            FlowLine leg = integrate(m, f, seed, stop);
            if (!leg.target)
                throw NonGenericWarning("unresolved second leg from " + saddle->label);
            const CriticalPoint* t = find_crit(*leg.target);
            if (t && t->morse_index >= 1)
                throw NonGenericWarning("second leg from " + saddle->label +
                                        " captured at the index-" + std::to_string(t->morse_index) +
                                        " point " + t->label + " (suspected non-Morse-Smale data)");
            leg_targets.push_back(*leg.target);
        }
        tr.second_leg_ok = true;
        for (const std::string& side : {tr.side_lo_label, tr.side_hi_label}) {
            if (side.empty()) continue;
            if (std::find(leg_targets.begin(), leg_targets.end(), side) == leg_targets.end())
                tr.second_leg_ok = false;
            out.boundary_events[side] += 1;
        }
        out.transitions.push_back(tr);
    }
    return out;
}

std::vector<ModuliCount> quotient_count(const std::vector<ModuliCount>& cover_counts,
                                        const std::vector<CriticalClass>& classes) {
    auto class_of = [&](const std::string& label) -> const CriticalClass* {
        for (const auto& cls : classes)
            for (const auto& c : cls.orbit)
                if (c.label == label) return &cls;
        return nullptr;
    };
    std::map<std::pair<std::string, std::string>, long> totals;
    for (const auto& mc : cover_counts) {
        const CriticalClass* a = class_of(mc.source);
        const CriticalClass* b = class_of(mc.target);
        if (!a || !b) throw Error("covering count references an unidentified point");
        totals[{a->representative.label, b->representative.label}] += mc.count;
    }
    std::vector<ModuliCount> out;
    for (const auto& [key, total] : totals) {
        if (total % 2 != 0)
            throw OddOrbitError("covering count " + key.first + " -> " + key.second +
                                " does not split into antipodal pairs");
        ModuliCount mc;
        mc.source = key.first;
        mc.target = key.second;
        mc.count = total / 2;
        mc.count_mod2 = int(mc.count % 2);
        mc.method = "quotient";
        out.push_back(std::move(mc));
    }
    return out;
}

} // namespace morseflow
