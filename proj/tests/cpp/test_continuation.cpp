#include "morseflow/continuation.hpp"
#include "morseflow/fixtures.hpp"

#include <doctest.h>

using namespace morseflow;

namespace {

struct Pack {
    Scene scene;
    SceneData data;
};

Pack pack(const std::string& fixture) {
    Scene sc = make_fixture(fixture);
    SceneData sd = build_scene_data(sc.model, sc.field, sc.moduli, sc.search);
    return {std::move(sc), std::move(sd)};
}

Homotopy between(const Pack& a, const Pack& b, double T = 2.0) {
    Homotopy h;
    h.model = &a.scene.model;
    h.f_minus = a.scene.field;
    h.f_plus = b.scene.field;
    h.g_minus = a.scene.model.metric();
    h.g_plus = b.scene.model.metric();
    h.T = T;
    return h;
}

bool is_identity(const BitMatrix& M) {
    if (M.rows() != M.cols()) return false;
    return M == BitMatrix::identity(M.rows());
}

} // namespace

TEST_CASE("trivial homotopy gives the identity chain map") {
    Pack a = pack("torus-cosine");
    Homotopy h = between(a, a);
    ContinuationParams prm;
    // counts: same-point pairs give one, distinct same-index pairs give zero
    for (const auto& c1 : a.data.crits) {
        for (const auto& c2 : a.data.crits) {
            if (c1.morse_index != c2.morse_index) continue;
            auto mc = count_continuation_lines(h, a.data, a.data, c1, c2, prm);
            REQUIRE(mc.count_mod2 == (c1.label == c2.label ? 1 : 0));
        }
    }
    ChainMapGF2 phi = chain_map(h, a.data, a.data, prm);
    REQUIRE(phi.chain_identity_ok);
    for (const auto& M : phi.phi) REQUIRE(is_identity(M));
    InducedMap Phi = induced_map(phi, a.data, a.data);
    CHECK(Phi.iso);
    for (const auto& M : Phi.matrix) CHECK(is_identity(M));
}

TEST_CASE("quarter-translate homotopy induces an isomorphism") {
    Pack a = pack("torus-cosine");
    Pack b = pack("torus-cosine-quarter");
    Homotopy h = between(a, b);
    ContinuationParams prm;
    ChainMapGF2 phi = chain_map(h, a.data, b.data, prm);
    REQUIRE(phi.chain_identity_ok);
    InducedMap Phi = induced_map(phi, a.data, b.data);
    CHECK(Phi.iso);
    // energy bounds and the sharp convex-homotopy action estimate
    auto bounds = energy_bound_check(h, phi.counts, a.data, b.data);
    CHECK(bounds.ok);
    CHECK(bounds.checked > 0);
    // Lipschitz continuity of spectral numbers
    auto lip = spectral_lipschitz_check(a.data, b.data, Phi);
    CHECK(lip.all_ok);
    CHECK(!lip.entries.empty());
}

TEST_CASE("roundtrip is the identity on homology") {
    Pack a = pack("torus-cosine");
    Pack b = pack("torus-cosine-quarter");
    ContinuationParams prm;
    Homotopy hab = between(a, b);
    Homotopy hba = between(b, a);
    InducedMap fwd = induced_map(chain_map(hab, a.data, b.data, prm), a.data, b.data);
    InducedMap bwd = induced_map(chain_map(hba, b.data, a.data, prm), b.data, a.data);
    InducedMap round = compose(bwd, fwd);
    for (const auto& M : round.matrix) CHECK(is_identity(M));
}

TEST_CASE("functoriality along the three-scene chain") {
    Pack a = pack("torus-cosine");
    Pack b = pack("torus-cosine-quarter");
    Pack c = pack("torus-cosine-half");
    ContinuationParams prm;
    InducedMap ab = induced_map(chain_map(between(a, b), a.data, b.data, prm), a.data, b.data);
    InducedMap bc = induced_map(chain_map(between(b, c), b.data, c.data, prm), b.data, c.data);
    InducedMap ac = induced_map(chain_map(between(a, c), a.data, c.data, prm), a.data, c.data);
    InducedMap composed = compose(bc, ab);
    REQUIRE(composed.matrix.size() == ac.matrix.size());
    for (size_t k = 0; k < ac.matrix.size(); ++k) REQUIRE(composed.matrix[k] == ac.matrix[k]);
}

TEST_CASE("independence of the homotopy on homology") {
    Pack a = pack("torus-cosine");
    Pack b = pack("torus-cosine-quarter");
    ContinuationParams prm;
    Homotopy h1 = between(a, b, 2.0);
    Homotopy h2 = between(a, b, 3.5);
    h2.beta_raw = [](double t) { return smoothstep3(t); };
    InducedMap m1 = induced_map(chain_map(h1, a.data, b.data, prm), a.data, b.data);
    InducedMap m2 = induced_map(chain_map(h2, a.data, b.data, prm), a.data, b.data);
    REQUIRE(m1.matrix.size() == m2.matrix.size());
    for (size_t k = 0; k < m1.matrix.size(); ++k) REQUIRE(m1.matrix[k] == m2.matrix[k]);
}

TEST_CASE("constant shift: trivial dynamics, tight Lipschitz bound") {
    Pack a = pack("torus-cosine");
    Scene shifted = make_fixture("torus-cosine");
    const ScalarField base = shifted.field;
    const double c = 0.75;
    shifted.field = ScalarField("torus-cosine-shifted",
                                [base, c](const Vec& p) { return base.value(p) + c; });
    shifted.field
        .with_gradient([base](const Vec& p) { return base.ambient_gradient(p); })
        .with_hessian([base](const Vec& p) { return base.ambient_hessian(p); });
    SceneData sd = build_scene_data(shifted.model, shifted.field, shifted.moduli, shifted.search);
    Pack b{std::move(shifted), std::move(sd)};
    Homotopy h = between(a, b);
    ContinuationParams prm;
    ChainMapGF2 phi = chain_map(h, a.data, b.data, prm);
    InducedMap Phi = induced_map(phi, a.data, b.data);
    REQUIRE(Phi.iso);
    auto lip = spectral_lipschitz_check(a.data, b.data, Phi);
    CHECK(lip.all_ok);
    for (const auto& e : lip.entries) {
        // sigma shifts by exactly c; the bound is tight
        CHECK(std::abs(e.sigma_to - e.sigma_from - c) < 1e-6);
        CHECK(std::abs(e.bound - c * 1.01) < 1e-3);
    }
}

TEST_CASE("metric change leaves spectral numbers fixed") {
    Pack a = pack("torus-cosine");
    Pack b = pack("torus-cosine-diag-metric");
    Homotopy h = between(a, b);
    ContinuationParams prm;
    ChainMapGF2 phi = chain_map(h, a.data, b.data, prm);
    InducedMap Phi = induced_map(phi, a.data, b.data);
    REQUIRE(Phi.iso);
    auto lip = spectral_lipschitz_check(a.data, b.data, Phi);
    for (const auto& e : lip.entries) CHECK(std::abs(e.sigma_to - e.sigma_from) < 1e-9);
}

TEST_CASE("manufactured bound violation is caught") {
    Pack a = pack("torus-cosine");
    Homotopy h = between(a, a);
    ContinuationParams prm;
    ChainMapGF2 phi = chain_map(h, a.data, a.data, prm);
    // corrupt a witness energy beyond the uniform budget
    REQUIRE(!phi.counts.empty());
    for (auto& mc : phi.counts) {
        if (!mc.witnesses.empty()) {
            mc.witnesses.front().energy = 1e6;
            break;
        }
    }
    CHECK_THROWS_AS(energy_bound_check(h, phi.counts, a.data, a.data), BoundViolation);
}

TEST_CASE("spectral extension along the monkey-saddle approximants") {
    std::vector<SceneData> members;
    Scene base = make_fixture("monkey-saddle");
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        Scene sc = make_fixture("monkey-saddle-perturbed(" + std::to_string(eps) + ")");
        members.push_back(build_scene_data(sc.model, sc.field, sc.moduli, sc.search));
    }
    ContinuationParams prm;
    auto ext = spectral_extend(members, base.field, base.model, prm);
    CHECK(ext.cauchy_ok);
    REQUIRE(!ext.traces.empty());
    for (const auto& tr : ext.traces) {
        for (size_t j = 0; j + 1 < tr.values.size(); ++j)
            REQUIRE(std::abs(tr.values[j + 1] - tr.values[j]) <=
                    ext.member_c0_steps[j] + 1e-6);
        CHECK(tr.distance_to_spectrum <= 1e-2);
    }
    // a constant sequence reproduces the plain spectral numbers
    std::vector<SceneData> constant{members.back(), members.back()};
    auto ext2 = spectral_extend(constant, members.back().field, base.model, prm);
    for (const auto& tr : ext2.traces) REQUIRE(tr.values.front() == doctest::Approx(tr.values.back()));
}
