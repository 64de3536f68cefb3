#include "morseflow/fredholm.hpp"

#include <doctest.h>

using namespace morseflow;

namespace {

OperatorFamily tanh_family(OperatorDomain domain, const Vec& a_minus, const Vec& a_plus) {
    OperatorFamily fam;
    fam.n = int(a_minus.size());
    fam.domain = domain;
    fam.A_minus = Mat(a_minus.asDiagonal());
    fam.A_plus = Mat(a_plus.asDiagonal());
    Mat Am = fam.A_minus, Ap = fam.A_plus;
    fam.A = [Am, Ap](double s) -> Mat {
        const double t = 0.5 * (1.0 + std::tanh(s));
        return (1.0 - t) * Am + t * Ap;
    };
    return fam;
}

Vec vlit(std::initializer_list<double> xs) {
    Vec v(int(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

} // namespace

TEST_CASE("constant coefficient scalar operator has trivial kernel and index zero") {
    OperatorFamily fam = tanh_family(OperatorDomain::FullLine, vlit({1.0}), vlit({1.0}));
    auto rep = numeric_index(fam);
    CHECK(rep.dim_ker == 0);
    CHECK(rep.dim_coker == 0);
    CHECK(rep.index == 0);
}

TEST_CASE("tanh profile: kernel 1/cosh, index one") {
    OperatorFamily fam = tanh_family(OperatorDomain::FullLine, vlit({-1.0}), vlit({1.0}));
    auto rep = numeric_index(fam);
    CHECK(rep.dim_ker == 1);
    CHECK(rep.dim_coker == 0);
    CHECK(rep.index == 1);
    CHECK(rep.predicted_index == 1);
}

TEST_CASE("two-component diagonal family: index one") {
    OperatorFamily fam = tanh_family(OperatorDomain::FullLine, vlit({-1.0, -1.0}),
                                     vlit({1.0, -1.0}));
    auto rep = numeric_index(fam);
    CHECK(rep.index == 1);
    CHECK(rep.dim_ker == 1);
}

TEST_CASE("compact interval kernel is the full recursion space") {
    OperatorFamily fam = tanh_family(OperatorDomain::CompactInterval, vlit({0.0}), vlit({0.0}));
    fam.T = 2.0;
    fam.A = [](double) { return Mat::Zero(1, 1); };
    GridSpec g;
    g.m = 2001;
    auto rep = numeric_index(fam, g);
    CHECK(rep.dim_ker == 1); // constants
    CHECK(rep.dim_coker == 0);
    CHECK(rep.index == 1);
    CHECK(rep.predicted_index == 1);
}

TEST_CASE("half-line index formulas") {
    SUBCASE("minus half-line: index mu(A-)") {
        OperatorFamily fam =
            tanh_family(OperatorDomain::HalfLineMinus, vlit({-1.0, -1.0, 1.0}), vlit({1.0, 1.0, 1.0}));
        auto rep = verify_index_formula(fam);
        CHECK(rep.predicted_index == 2);
        CHECK(rep.index == 2);
        CHECK(rep.dim_coker == 0);
    }
    SUBCASE("plus half-line: index n - mu(A+)") {
        OperatorFamily fam =
            tanh_family(OperatorDomain::HalfLinePlus, vlit({-1.0, 1.0}), vlit({-1.0, 1.0}));
        auto rep = verify_index_formula(fam);
        CHECK(rep.predicted_index == 1);
        CHECK(rep.index == 1);
        CHECK(rep.dim_coker == 0);
    }
    SUBCASE("compact interval: index n") {
        std::mt19937_64 rng(3);
        OperatorFamily fam = random_tanh_family(3, OperatorDomain::CompactInterval, rng);
        auto rep = verify_index_formula(fam);
        CHECK(rep.predicted_index == 3);
        CHECK(rep.index == 3);
    }
}

TEST_CASE("diagonal full-line kernels follow the max formula") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        OperatorFamily fam = random_tanh_family(2, OperatorDomain::FullLine, rng, /*diagonal=*/true);
        auto rep = numeric_index(fam);
        const int expect = std::max(fam.mu_minus() - fam.mu_plus(), 0);
        REQUIRE(rep.dim_ker == expect);
        REQUIRE(rep.index == fam.mu_minus() - fam.mu_plus());
    }
}

TEST_CASE("index is stable under small compactly supported perturbations") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 6; ++trial) {
        OperatorFamily fam = random_tanh_family(2, OperatorDomain::FullLine, rng);
        auto base = numeric_index(fam);
        OperatorFamily bumped = fam;
        auto A0 = fam.A;
        std::normal_distribution<double> nd(0.0, 0.05);
        Mat B(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) B(i, j) = nd(rng);
        B *= 0.1 / std::max(0.1, B.norm());
        bumped.A = [A0, B](double s) -> Mat {
            const double bump = std::abs(s) < 5.0 ? sq(std::cos(M_PI * s / 10.0)) : 0.0;
            return A0(s) + bump * B;
        };
        auto pert = numeric_index(bumped);
        REQUIRE(pert.index == base.index);
    }
}

TEST_CASE("index additivity across domain splitting") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 2;
        OperatorFamily full = random_tanh_family(n, OperatorDomain::FullLine, rng);
        OperatorFamily minus = full, plus = full, compact = full;
        minus.domain = OperatorDomain::HalfLineMinus;
        plus.domain = OperatorDomain::HalfLinePlus;
        compact.domain = OperatorDomain::CompactInterval;
        compact.T = 2.0;
        const int i_full = numeric_index(full).index;
        const int i_minus = numeric_index(minus).index;
        const int i_plus = numeric_index(plus).index;
        const int i_compact = numeric_index(compact).index;
        REQUIRE(i_full == i_minus + i_compact + i_plus - 2 * n);
    }
}

TEST_CASE("block structure of a diagonal family") {
    OperatorFamily fam = tanh_family(OperatorDomain::FullLine, vlit({-1.0, 2.0}), vlit({1.0, 2.0}));
    GridSpec g;
    g.L = 30.0;
    g.m = 400; // coarse grid just to look at the block pattern
    Discretization d = discretize(fam, g);
    for (int k = 0; k < d.m - 1; ++k) {
        REQUIRE(std::abs(d.sub[size_t(k)](0, 1)) < 1e-14);
        REQUIRE(std::abs(d.sub[size_t(k)](1, 0)) < 1e-14);
    }
}

TEST_CASE("grid floor is enforced") {
    OperatorFamily fam = tanh_family(OperatorDomain::FullLine, vlit({-1.0}), vlit({1.0}));
    GridSpec g;
    g.m = 50;
    CHECK_THROWS_AS(discretize(fam, g), GridTooCoarse);
}

TEST_CASE("infinitesimal gluing matches the closed form") {
    SUBCASE("worked example H = diag(-1, 1), T = 2") {
        auto out = infinitesimal_glue(vlit({-1.0, 1.0}), 2.0, vlit({1.0}), vlit({1.0}));
        CHECK(out.block1[0] == doctest::Approx(std::exp(-4.0)).epsilon(1e-8));
        CHECK(out.block2[0] == doctest::Approx(1.0));
        CHECK(out.block3[0] == doctest::Approx(1.0));
        CHECK(out.block4[0] == doctest::Approx(std::exp(-4.0)).epsilon(1e-8));
        CHECK(out.max_error < 1e-8);
    }
    SUBCASE("zero input gives zero") {
        auto out = infinitesimal_glue(vlit({-1.0, 1.0}), 3.0, vlit({0.0}), vlit({0.0}));
        CHECK(out.block1.norm() == doctest::Approx(0.0));
        CHECK(out.block4.norm() == doctest::Approx(0.0));
    }
    SUBCASE("large T decouples the boundary blocks") {
        auto out = infinitesimal_glue(vlit({-1.5, 0.8}), 9.0, vlit({1.0}), vlit({-2.0}));
        CHECK(std::abs(out.block1[0]) < 2e-12 + 2.0 * std::exp(-27.0));
        CHECK(std::abs(out.block4[0]) < 2e-12 + std::exp(-14.4));
        CHECK(out.max_error < 1e-8);
    }
    SUBCASE("overflow guard") {
        CHECK_THROWS_AS(infinitesimal_glue(vlit({-200.0, 200.0}), 2.0, vlit({1.0}), vlit({1.0})),
                        IllConditioned);
    }
    SUBCASE("independent of the cutoff shape") {
        auto a = infinitesimal_glue(vlit({-1.0, 0.5, 2.0}), 3.0, vlit({0.4, -0.3}), vlit({1.2}));
        auto b = infinitesimal_glue(vlit({-1.0, 0.5, 2.0}), 3.0, vlit({0.4, -0.3}), vlit({1.2}),
                                    [](double t) { return smoothstep3(t); });
        CHECK((a.block1 - b.block1).norm() < 1e-12);
        CHECK((a.block4 - b.block4).norm() < 1e-12);
    }
}
