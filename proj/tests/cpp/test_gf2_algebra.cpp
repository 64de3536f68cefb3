#include "morseflow/algebra.hpp"
#include "morseflow/fixtures.hpp"
#include "morseflow/scene.hpp"

#include <doctest.h>

#include <random>

using namespace morseflow;

namespace {

ChainComplexGF2 heart() { return make_fixture("heart-complex").abstract_complex; }

// brute-force dimension of ker/im by enumerating all GF(2) vectors
int brute_kernel_dim(const BitMatrix& A) {
    int count = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << A.cols()); ++mask) {
        BitVec x(A.cols());
        for (int b = 0; b < A.cols(); ++b)
            if ((mask >> b) & 1) x.set(b, true);
        if (!A.apply(x).any()) ++count;
    }
    int dim = 0;
    while ((1 << dim) < count) ++dim;
    return dim;
}

int brute_image_dim(const BitMatrix& A) {
    std::vector<std::string> seen;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << A.cols()); ++mask) {
        BitVec x(A.cols());
        for (int b = 0; b < A.cols(); ++b)
            if ((mask >> b) & 1) x.set(b, true);
        std::string key = A.apply(x).to_string();
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
    }
    int dim = 0;
    while ((std::size_t(1) << dim) < seen.size()) ++dim;
    return dim;
}

std::mt19937_64 rng(2024);

BitMatrix random_matrix(int r, int c, double density = 0.5) {
    BitMatrix M(r, c);
    std::bernoulli_distribution coin(density);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M.set(i, j, coin(rng));
    return M;
}

// random two-step complex with boundary-squared zero: d1 random, d2 columns
// drawn from ker d1
ChainComplexGF2 random_complex(int n0, int n1, int n2, double value_scale = 1.0) {
    BitMatrix d1 = random_matrix(n0, n1, 0.3);
    auto ker = d1.kernel_basis();
    BitMatrix d2(n1, n2);
    std::uniform_int_distribution<int> pick(0, std::max(1, int(ker.size())) - 1);
    std::bernoulli_distribution coin(0.5);
    for (int j = 0; j < n2 && !ker.empty(); ++j) {
        BitVec col(n1);
        for (const auto& kv : ker)
            if (coin(rng)) col ^= kv;
        for (int i = 0; i < n1; ++i) d2.set(i, j, col.get(i));
    }
    std::vector<std::vector<Generator>> gens(3);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    for (int i = 0; i < n0; ++i) gens[0].push_back({"a" + std::to_string(i), value_scale * val(rng)});
    for (int i = 0; i < n1; ++i) gens[1].push_back({"b" + std::to_string(i), value_scale * val(rng)});
    for (int i = 0; i < n2; ++i) gens[2].push_back({"c" + std::to_string(i), value_scale * val(rng)});
    ChainComplexGF2 cx;
    cx.generators = gens;
    cx.boundary.resize(3);
    cx.boundary[0] = BitMatrix(0, n0);
    cx.boundary[1] = d1;
    cx.boundary[2] = d2;
    return cx;
}

} // namespace

TEST_CASE("heart complex: boundary, homology, representative") {
    auto cx = heart();
    CHECK(verify_boundary_squared(cx).ok);
    auto h = homology(cx);
    REQUIRE(h.betti == std::vector<int>{1, 0, 1});
    // the degree-2 class is generated by x1 + x2
    REQUIRE(h.representatives[2].size() == 1);
    CHECK(h.representatives[2][0].get(0));
    CHECK(h.representatives[2][0].get(1));
}

TEST_CASE("punctured heart fails boundary squared at degree 2") {
    auto cx = make_fixture("punctured-heart").abstract_complex;
    auto bc = verify_boundary_squared(cx);
    CHECK_FALSE(bc.ok);
    CHECK(bc.offending_degree == 2);
    CHECK_THROWS_AS(homology(cx), NotAComplexError);
}

TEST_CASE("empty complex verifies") {
    ChainComplexGF2 cx;
    CHECK(verify_boundary_squared(cx).ok);
}

TEST_CASE("abstract declarations match the worked boundary data") {
    auto cx = heart();
    CHECK(cx.boundary[2].get(0, 0));
    CHECK(cx.boundary[2].get(0, 1));
    CHECK(cx.boundary[1].is_zero());
}

TEST_CASE("genus-g complex has betti (1, 2g, 1) and zero slack") {
    for (int g : {1, 2, 3}) {
        auto cx = make_fixture("genus-g-complex(" + std::to_string(g) + ")").abstract_complex;
        auto h = homology(cx);
        REQUIRE(h.betti == std::vector<int>{1, 2 * g, 1});
        auto mc = morse_inequality_check(cx.total_generators(), h);
        CHECK(mc.ok);
        CHECK(mc.slack == 0);
    }
}

TEST_CASE("morse inequality on the heart has slack two") {
    auto cx = heart();
    auto h = homology(cx);
    auto mc = morse_inequality_check(cx.total_generators(), h);
    CHECK(mc.ok);
    CHECK(mc.slack == 2);
}

TEST_CASE("rank and kernel match brute-force enumeration on small matrices") {
    for (int trial = 0; trial < 30; ++trial) {
        BitMatrix A = random_matrix(3 + trial % 3, 4 + trial % 4);
        REQUIRE(int(A.kernel_basis().size()) == brute_kernel_dim(A));
        REQUIRE(A.rank() == brute_image_dim(A));
        REQUIRE(A.rank() + int(A.kernel_basis().size()) == A.cols());
    }
}

TEST_CASE("betti numbers agree with brute-force enumeration on random complexes") {
    for (int trial = 0; trial < 20; ++trial) {
        auto cx = random_complex(3, 4, 3);
        REQUIRE(verify_boundary_squared(cx).ok);
        auto h = homology(cx);
        const int k1_brute = brute_kernel_dim(cx.boundary[1]);
        const int i2_brute = brute_image_dim(cx.boundary[2]);
        REQUIRE(h.betti[1] == k1_brute - i2_brute);
    }
}

TEST_CASE("spectral numbers: worked values") {
    auto cx = heart();
    auto h = homology(cx);
    // degree 2 class [x1+x2]: singleton coset, sigma = max(5,4) = 5
    CHECK(spectral_number(cx, 2, h.representatives[2][0]) == doctest::Approx(5.0));
    // degree 0 class [z]: sigma = f(z) = 0
    CHECK(spectral_number(cx, 0, h.representatives[0][0]) == doctest::Approx(0.0));
    auto rep = spectral_report(cx, h);
    CHECK(rep.homological_spectrum == std::vector<double>{0.0, 5.0});
    CHECK(action_gap(rep) == doctest::Approx(5.0));
}

TEST_CASE("zero class is rejected") {
    auto cx = heart();
    BitVec zero(2);
    CHECK_THROWS_AS(spectral_number(cx, 2, zero), ZeroClassError);
}

TEST_CASE("greedy reduction equals exhaustive enumeration") {
    int nontrivial = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto cx = random_complex(3 + trial % 2, 5, 4);
        auto h = homology(cx);
        for (int k = 0; k <= 1; ++k) {
            for (const auto& v : h.representatives[size_t(k)]) {
                const double g = spectral_number_greedy(cx, k, v);
                const double e = spectral_number_exhaustive(cx, k, v, 20);
                REQUIRE(g == doctest::Approx(e));
                ++nontrivial;
            }
        }
    }
    REQUIRE(nontrivial > 50);
}

TEST_CASE("spectrality: every sigma is a generator value") {
    for (int trial = 0; trial < 20; ++trial) {
        auto cx = random_complex(4, 5, 3);
        auto h = homology(cx);
        auto rep = spectral_report(cx, h);
        for (const auto& sc : rep.classes) {
            bool found = false;
            for (double v : rep.spectrum)
                if (std::abs(v - sc.sigma) <= 1e-9) found = true;
            REQUIRE(found);
        }
    }
}

TEST_CASE("singleton homological spectrum flags an infinite gap") {
    auto cx = make_abstract_complex({{{"z", 1.0}}}, {{}});
    auto h = homology(cx);
    auto rep = spectral_report(cx, h);
    CHECK(rep.singleton_spectrum);
    CHECK(std::isinf(rep.action_gap));
}

TEST_CASE("build_complex demands full pair coverage") {
    std::vector<CriticalPoint> crits(2);
    crits[0].label = "top";
    crits[0].value = 1.0;
    crits[0].morse_index = 1;
    crits[0].location = Vec::Zero(1);
    crits[1].label = "bot";
    crits[1].value = 0.0;
    crits[1].morse_index = 0;
    crits[1].location = Vec::Ones(1);
    CHECK_THROWS_AS(build_complex(crits, {}), MissingPairError);
    auto cx = build_complex(crits, {{"top", "bot", 2, 0}});
    CHECK(cx.boundary[1].is_zero());
}
