// Acceptance suite: each case checks one criterion end to end and the
// listener prints a single PASS/FAIL line per criterion.
#include "morseflow/continuation.hpp"
#include "morseflow/fixtures.hpp"
#include "morseflow/fredholm.hpp"
#include "morseflow/pipeline.hpp"

#include <doctest.h>

#include <chrono>
#include <cstdio>

using namespace morseflow;

namespace {

struct CriterionReporter : public doctest::IReporter {
    const doctest::TestCaseData* current = nullptr;
    explicit CriterionReporter(const doctest::ContextOptions&) {}
    void report_query(const doctest::QueryData&) override {}
    void test_run_start() override {}
    void test_run_end(const doctest::TestRunStats&) override {}
    void test_case_start(const doctest::TestCaseData& in) override { current = &in; }
    void test_case_reenter(const doctest::TestCaseData&) override {}
    void test_case_end(const doctest::CurrentTestCaseStats& st) override {
        if (current)
            std::printf("[%s] %s\n", current->m_name,
                        st.failure_flags == 0 ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
    void test_case_exception(const doctest::TestCaseException&) override {}
    void subcase_start(const doctest::SubcaseSignature&) override {}
    void subcase_end() override {}
    void log_assert(const doctest::AssertData&) override {}
    void log_message(const doctest::MessageData&) override {}
    void test_case_skipped(const doctest::TestCaseData&) override {}
};

REGISTER_LISTENER("criteria", 1, CriterionReporter);

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

Vec v3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

const CriticalPoint* find_at(const std::vector<CriticalPoint>& crits, const ManifoldModel& m,
                             const Vec& loc, double tol = 1e-6) {
    for (const auto& c : crits)
        if (m.distance(c.location, loc) < tol) return &c;
    return nullptr;
}

std::vector<int> sorted_indices(const std::vector<CriticalPoint>& crits) {
    std::vector<int> idx;
    for (const auto& c : crits) idx.push_back(c.morse_index);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void check_energy_identity(const Report& rep, const Scene& sc, double& worst) {
    const auto& counts = rep.cover_counts.empty() ? rep.counts : rep.cover_counts;
    for (const auto& mc : counts) {
        for (const auto& w : mc.witnesses) {
            if (!w.resolved()) continue;
            const CriticalPoint* src = nullptr;
            const CriticalPoint* dst = nullptr;
            for (const auto& c : rep.criticals) {
                if (c.label == *w.source) src = &c;
                if (c.label == *w.target) dst = &c;
            }
            REQUIRE(src);
            REQUIRE(dst);
            const double E = energy(w, sc.model);
            const double drop = src->value - dst->value;
            const double err = std::abs(E - drop);
            worst = std::max(worst, err / (1.0 + std::abs(E)));
            REQUIRE(err <= 1e-6 * (1.0 + std::abs(E)));
        }
    }
}

} // namespace

TEST_CASE("criterion 1: round sphere") {
    Timer t;
    Report rep = run_pipeline(make_fixture("round-sphere"));
    REQUIRE(rep.exit_status == 0);
    REQUIRE(rep.criticals.size() == 2);
    REQUIRE(sorted_indices(rep.criticals) == std::vector<int>{0, 2});
    REQUIRE(rep.has_homology);
    REQUIRE(rep.homol.betti == std::vector<int>{1, 0, 1});
    CHECK(t.seconds() < 10.0);
}

TEST_CASE("criterion 2: ellipsoid on the sphere") {
    Timer t;
    Scene sc = make_fixture("ellipsoid");
    Report rep = run_pipeline(sc);
    REQUIRE(rep.exit_status == 0);
    REQUIRE(rep.criticals.size() == 6);
    // locations within 1e-8
    for (const Vec& p : {v3(1, 0, 0), v3(-1, 0, 0), v3(0, 1, 0), v3(0, -1, 0), v3(0, 0, 1),
                         v3(0, 0, -1)})
        REQUIRE(find_at(rep.criticals, sc.model, p, 1e-8));
    // each max -> each saddle and each saddle -> each min once
    const auto* u1 = find_at(rep.criticals, sc.model, v3(0, 0, 1));
    const auto* u2 = find_at(rep.criticals, sc.model, v3(0, 0, -1));
    const auto* s1 = find_at(rep.criticals, sc.model, v3(0, 1, 0));
    const auto* s2 = find_at(rep.criticals, sc.model, v3(0, -1, 0));
    auto count_of = [&](const std::string& a, const std::string& b) -> long {
        for (const auto& mc : rep.counts)
            if (mc.source == a && mc.target == b) return mc.count;
        return -1;
    };
    for (const auto* up : {u1, u2})
        for (const auto* dn : {s1, s2}) REQUIRE(count_of(up->label, dn->label) == 1);
    for (const auto* up : {s1, s2}) {
        REQUIRE(count_of(up->label, find_at(rep.criticals, sc.model, v3(1, 0, 0))->label) == 1);
        REQUIRE(count_of(up->label, find_at(rep.criticals, sc.model, v3(-1, 0, 0))->label) == 1);
    }
    // boundary columns of the maxima are v1 + v2
    const int k2 = 2;
    const int col1 = rep.complex.generator_index(k2, u1->label);
    const int col2 = rep.complex.generator_index(k2, u2->label);
    for (int row = 0; row < rep.complex.dim(1); ++row) {
        REQUIRE(rep.complex.boundary[2].get(row, col1));
        REQUIRE(rep.complex.boundary[2].get(row, col2));
    }
    REQUIRE(rep.homol.betti == std::vector<int>{1, 0, 1});
    CHECK(t.seconds() < 60.0);
}

TEST_CASE("criterion 3: projective plane quotient") {
    Report rep = run_pipeline(make_fixture("rp2-ellipsoid"));
    REQUIRE(rep.exit_status == 0);
    REQUIRE(rep.quotient_classes.size() == 3);
    // covering counts split evenly: quotient_count would have thrown otherwise
    for (const auto& mc : rep.counts) REQUIRE(mc.count_mod2 == 0);
    for (int k = 1; k <= rep.complex.max_degree(); ++k)
        REQUIRE(rep.complex.boundary[size_t(k)].is_zero());
    REQUIRE(rep.homol.betti == std::vector<int>{1, 1, 1});
}

TEST_CASE("criterion 4: flat torus cosine field") {
    Timer t;
    Report rep = run_pipeline(make_fixture("torus-cosine"));
    REQUIRE(rep.exit_status == 0);
    REQUIRE(rep.criticals.size() == 4);
    REQUIRE(sorted_indices(rep.criticals) == std::vector<int>{0, 1, 1, 2});
    for (const auto& mc : rep.counts) {
        REQUIRE(mc.count == 2);
        REQUIRE(mc.count_mod2 == 0);
    }
    REQUIRE(rep.homol.betti == std::vector<int>{1, 2, 1});
    CHECK(t.seconds() < 60.0);
}

TEST_CASE("criterion 5: monkey saddle halts the pipeline") {
    Report rep = run_pipeline(make_fixture("monkey-saddle"));
    REQUIRE(rep.criticals.size() == 3);
    int degenerate = 0;
    for (const auto& c : rep.criticals)
        if (c.sylvester.n_zero >= 1) ++degenerate;
    REQUIRE(degenerate == 1);
    REQUIRE(rep.exit_status == 2);
    REQUIRE(!rep.warnings.empty());
    REQUIRE(rep.warnings.front().find("MorseViolation") != std::string::npos);
    REQUIRE_FALSE(rep.has_complex);
}

TEST_CASE("criterion 6: heart and punctured heart") {
    Report heart = run_pipeline(make_fixture("heart-complex"));
    REQUIRE(heart.boundary_check.ok);
    REQUIRE(heart.homol.betti == std::vector<int>{1, 0, 1});
    REQUIRE(heart.homol.representatives[2].size() == 1);
    REQUIRE(heart.homol.representatives[2][0].get(0));
    REQUIRE(heart.homol.representatives[2][0].get(1));

    Report punctured = run_pipeline(make_fixture("punctured-heart"));
    REQUIRE_FALSE(punctured.boundary_check.ok);
    REQUIRE(punctured.boundary_check.offending_degree == 2);
}

TEST_CASE("criterion 7: real-line fixtures") {
    Report parabola = run_pipeline(make_fixture("real-line-parabola"));
    REQUIRE(parabola.homol.betti == std::vector<int>{1});
    for (int n = 2; n <= 6; ++n) {
        Report many = run_pipeline(make_fixture("real-line-many-minima(" + std::to_string(n) + ")"));
        REQUIRE(many.criticals.size() == size_t(2 * n + 1));
        REQUIRE(many.homol.betti == std::vector<int>{1, 0});
        REQUIRE(many.complex.boundary[1].rank() == n);
    }
    Report slope = run_pipeline(make_fixture("real-line-slope"));
    REQUIRE(slope.criticals.empty());
    REQUIRE_FALSE(slope.has_complex);
    REQUIRE(slope.exit_status == 0);
}

TEST_CASE("criterion 8: energy identity on every resolved line") {
    double worst = 0.0;
    for (const char* fixture :
         {"round-sphere", "ellipsoid", "torus-cosine", "real-line-many-minima(3)", "peanut-sphere"}) {
        Scene sc = make_fixture(fixture);
        Report rep = run_pipeline(sc);
        REQUIRE(rep.exit_status == 0);
        check_energy_identity(rep, sc, worst);
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("criterion 9: exponential decay rates") {
    Scene sphere = make_fixture("round-sphere");
    auto scrits = find_critical_points(sphere.field, sphere.model, sphere.search).points;
    StopRule stop{&scrits, 1e-6, 1e-6, 500.0};
    FlowLine line = integrate(sphere.model, sphere.field, v3(1, 0, 0), stop);
    const auto* south = find_at(scrits, sphere.model, v3(0, 0, -1));
    REQUIRE(line.target.has_value());
    auto fit = decay_rate(line, sphere.model, *south);
    REQUIRE(std::abs(fit.rate - 1.0) <= 0.05);

    Scene torus = make_fixture("torus-cosine");
    auto tcrits = find_critical_points(torus.field, torus.model, torus.search).points;
    StopRule tstop{&tcrits, 1e-6, 1e-6, 500.0};
    FlowLine tline = integrate(torus.model, torus.field, v2(0.25, 0.5 + 1e-3), tstop);
    const auto* min = find_at(tcrits, torus.model, v2(0.5, 0.5));
    REQUIRE(tline.target.has_value());
    auto tfit = decay_rate(tline, torus.model, *min);
    REQUIRE(std::abs(tfit.rate - 4.0 * M_PI * M_PI) <= 0.05 * 4.0 * M_PI * M_PI);
}

TEST_CASE("criterion 10: moduli scans with broken limits") {
    for (const char* fixture : {"ellipsoid", "peanut-sphere"}) {
        Timer t;
        Scene sc = make_fixture(fixture);
        sc.run_scans = true;
        Report rep = run_pipeline(sc);
        REQUIRE(rep.exit_status == 0);
        REQUIRE(!rep.scans.empty());
        for (const auto& scan : rep.scans) {
            for (const auto& tr : scan.transitions) {
                const CriticalPoint* s = nullptr;
                for (const auto& c : rep.criticals)
                    if (c.label == tr.saddle) s = &c;
                REQUIRE(s);
                REQUIRE(s->morse_index == 1);
                REQUIRE(tr.second_leg_ok);
            }
            REQUIRE(scan.events_even());
        }
        // mod-2 double count through the counts table
        auto count_of = [&](const std::string& a, const std::string& b) -> long {
            for (const auto& mc : rep.counts)
                if (mc.source == a && mc.target == b) return mc.count;
            return 0;
        };
        for (const auto& up : rep.criticals) {
            if (up.morse_index != 2) continue;
            for (const auto& bottom : rep.criticals) {
                if (bottom.morse_index != 0) continue;
                long total = 0;
                for (const auto& mid : rep.criticals)
                    if (mid.morse_index == 1)
                        total += count_of(up.label, mid.label) * count_of(mid.label, bottom.label);
                REQUIRE(total % 2 == 0);
            }
        }
        CHECK(t.seconds() < 300.0);
    }
}

TEST_CASE("criterion 11: fredholm index sweep") {
    Timer t;
    std::mt19937_64 rng(2026);
    for (OperatorDomain domain :
         {OperatorDomain::FullLine, OperatorDomain::HalfLineMinus, OperatorDomain::HalfLinePlus,
          OperatorDomain::CompactInterval}) {
        int matches = 0;
        for (int k = 0; k < 20; ++k) {
            OperatorFamily fam = random_tanh_family(2, domain, rng);
            IndexReport rep = verify_index_formula(fam);
            if (rep.prediction_matches) ++matches;
        }
        REQUIRE(matches == 20);
    }
    // diagonal kernels follow the max formula
    for (int k = 0; k < 20; ++k) {
        OperatorFamily fam = random_tanh_family(2, OperatorDomain::FullLine, rng, true);
        IndexReport rep = numeric_index(fam);
        REQUIRE(rep.dim_ker == std::max(fam.mu_minus() - fam.mu_plus(), 0));
    }
    CHECK(t.seconds() < 120.0);
}

TEST_CASE("criterion 12: infinitesimal gluing formula") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> mag(0.3, 3.0);
    std::uniform_real_distribution<double> comp(-2.0, 2.0);
    std::uniform_int_distribution<int> dim(2, 4);
    std::uniform_real_distribution<double> tdist(2.0, 6.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = dim(rng);
        std::uniform_int_distribution<int> mudist(1, n - 1);
        const int mu = mudist(rng);
        Vec H(n);
        double T = tdist(rng);
        for (int i = 0; i < n; ++i) H[i] = (i < mu ? -1.0 : 1.0) * mag(rng);
        std::sort(H.data(), H.data() + n);
        if (T * H.cwiseAbs().maxCoeff() > 20.0) T = 20.0 / H.cwiseAbs().maxCoeff();
        if (T < 2.0) T = 2.0;
        Vec xm(mu), xp(n - mu);
        for (int i = 0; i < mu; ++i) xm[i] = comp(rng);
        for (int i = 0; i < n - mu; ++i) xp[i] = comp(rng);
        auto out = infinitesimal_glue(H, T, xp, xm);
        REQUIRE(out.max_error <= 1e-8);
    }
}

TEST_CASE("criterion 13: continuation maps") {
    Timer t;
    ContinuationParams prm;
    Scene a = make_fixture("torus-cosine");
    Scene b = make_fixture("torus-cosine-quarter");
    Scene c = make_fixture("torus-cosine-half");
    SceneData da = build_scene_data(a.model, a.field, a.moduli, a.search);
    SceneData db = build_scene_data(b.model, b.field, b.moduli, b.search);
    SceneData dc = build_scene_data(c.model, c.field, c.moduli, c.search);
    auto mk = [&](const Scene& from, const Scene& to) {
        Homotopy h;
        h.model = &a.model;
        h.f_minus = from.field;
        h.f_plus = to.field;
        h.g_minus = from.model.metric();
        h.g_plus = to.model.metric();
        return h;
    };
    // trivial homotopy: exact identity chain map
    ChainMapGF2 triv = chain_map(mk(a, a), da, da, prm);
    REQUIRE(triv.chain_identity_ok);
    for (const auto& M : triv.phi) REQUIRE(M == BitMatrix::identity(M.rows()));
    // translate pair: isomorphism on homology
    ChainMapGF2 pab = chain_map(mk(a, b), da, db, prm);
    InducedMap ab = induced_map(pab, da, db);
    REQUIRE(pab.chain_identity_ok);
    REQUIRE(ab.iso);
    // functoriality through the three scenes
    InducedMap bc = induced_map(chain_map(mk(b, c), db, dc, prm), db, dc);
    InducedMap ac = induced_map(chain_map(mk(a, c), da, dc, prm), da, dc);
    InducedMap comp = compose(bc, ab);
    REQUIRE(comp.matrix.size() == ac.matrix.size());
    for (size_t k = 0; k < ac.matrix.size(); ++k) REQUIRE(comp.matrix[k] == ac.matrix[k]);
    // roundtrip identity
    InducedMap ba = induced_map(chain_map(mk(b, a), db, da, prm), db, da);
    InducedMap round = compose(ba, ab);
    for (const auto& M : round.matrix) REQUIRE(M == BitMatrix::identity(M.rows()));
    CHECK(t.seconds() < 300.0);
}

TEST_CASE("criterion 14: spectral numbers") {
    // greedy equals exhaustive on every abstract fixture complex (<= 12 gens)
    for (const char* fixture : {"heart-complex", "genus-g-complex(1)", "genus-g-complex(2)"}) {
        auto cx = make_fixture(fixture).abstract_complex;
        auto h = homology(cx);
        for (int k = 0; k <= cx.max_degree(); ++k)
            for (const auto& v : h.representatives[size_t(k)])
                REQUIRE(spectral_number_greedy(cx, k, v) ==
                        doctest::Approx(spectral_number_exhaustive(cx, k, v, 20)));
    }
    // every sigma sits in the spectrum
    for (const char* fixture : {"torus-cosine", "ellipsoid"}) {
        Report rep = run_pipeline(make_fixture(fixture));
        REQUIRE(rep.has_spectral);
        for (const auto& sc : rep.spectral.classes) {
            bool on_spectrum = false;
            for (double v : rep.spectral.spectrum)
                if (std::abs(v - sc.sigma) <= 1e-9) on_spectrum = true;
            REQUIRE(on_spectrum);
        }
    }
    // many-minima degree-0 spectral number equals the global minimum value
    {
        Report rep = run_pipeline(make_fixture("real-line-many-minima(4)"));
        REQUIRE(rep.has_spectral);
        double global_min = std::numeric_limits<double>::infinity();
        for (const auto& c : rep.criticals) global_min = std::min(global_min, c.value);
        bool found = false;
        for (const auto& sc : rep.spectral.classes)
            if (sc.degree == 0) {
                REQUIRE(sc.sigma == doctest::Approx(global_min).epsilon(1e-12));
                found = true;
            }
        REQUIRE(found);
    }
    // Lipschitz bound on the translate pair and tight constant shift
    {
        ContinuationParams prm;
        Scene a = make_fixture("torus-cosine");
        Scene b = make_fixture("torus-cosine-quarter");
        SceneData da = build_scene_data(a.model, a.field, a.moduli, a.search);
        SceneData db = build_scene_data(b.model, b.field, b.moduli, b.search);
        Homotopy h;
        h.model = &a.model;
        h.f_minus = a.field;
        h.f_plus = b.field;
        h.g_minus = a.model.metric();
        h.g_plus = b.model.metric();
        InducedMap Phi = induced_map(chain_map(h, da, db, prm), da, db);
        auto lip = spectral_lipschitz_check(da, db, Phi);
        REQUIRE(lip.all_ok);

        const double shift = 0.5;
        ScalarField base = a.field;
        Scene bs = make_fixture("torus-cosine");
        bs.field = ScalarField("shifted", [base, shift](const Vec& p) {
            return base.value(p) + shift;
        });
        bs.field.with_gradient([base](const Vec& p) { return base.ambient_gradient(p); })
            .with_hessian([base](const Vec& p) { return base.ambient_hessian(p); });
        SceneData ds = build_scene_data(bs.model, bs.field, bs.moduli, bs.search);
        Homotopy hs = h;
        hs.f_plus = bs.field;
        InducedMap Phis = induced_map(chain_map(hs, da, ds, prm), da, ds);
        auto lips = spectral_lipschitz_check(da, ds, Phis);
        REQUIRE(lips.all_ok);
        for (const auto& e : lips.entries)
            REQUIRE(std::abs(std::abs(e.sigma_to - e.sigma_from) - shift) <= 1e-6);
    }
}

TEST_CASE("criterion 15: spectral extension to the monkey saddle") {
    std::vector<SceneData> members;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        Scene sc = make_fixture("monkey-saddle-perturbed(" + std::to_string(eps) + ")");
        members.push_back(build_scene_data(sc.model, sc.field, sc.moduli, sc.search));
    }
    Scene limit = make_fixture("monkey-saddle");
    ContinuationParams prm;
    auto ext = spectral_extend(members, limit.field, limit.model, prm);
    REQUIRE(ext.cauchy_ok);
    REQUIRE(!ext.traces.empty());
    for (const auto& tr : ext.traces) {
        for (size_t j = 0; j + 1 < tr.values.size(); ++j)
            REQUIRE(std::abs(tr.values[j + 1] - tr.values[j]) <= ext.member_c0_steps[j] + 1e-9);
        REQUIRE(tr.distance_to_spectrum <= 1e-2);
    }
}
