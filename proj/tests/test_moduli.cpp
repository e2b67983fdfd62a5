#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crtwist/moduli.hpp"
#include "oracles.hpp"

using namespace crtwist;
using Catch::Approx;

TEST_CASE("quintic roots reproduce the published values") {
    // c = (-2, 1)
    auto spec = quintic_roots({-2.0, 1.0});
    REQUIRE(spec.real_roots.size() == 3);
    CHECK(spec.real_roots[0].value == Approx(-2.44175).margin(1e-4));
    CHECK(spec.real_roots[1].value == Approx(-0.9904).margin(1e-4));
    CHECK(spec.real_roots[2].value == Approx(2.87645).margin(1e-4));

    auto spec2 = quintic_roots({1.0 / 6.0, 8.0});
    REQUIRE(spec2.real_roots.size() == 3);
    CHECK(spec2.real_roots[0].value == Approx(-2.14118).margin(1e-4));
    CHECK(spec2.real_roots[1].value == Approx(-0.448099).margin(1e-4));
    CHECK(spec2.real_roots[2].value == Approx(0.0701938).margin(1e-4));

    auto spec3 = quintic_roots({1.0 / 6.0, -8.0});
    REQUIRE(spec3.real_roots.size() == 3);
    CHECK(spec3.real_roots[0].value == Approx(0.12498).margin(1e-4));
    CHECK(spec3.real_roots[1].value == Approx(0.250656).margin(1e-4));
    CHECK(spec3.real_roots[2].value == Approx(2.15383).margin(1e-4));

    auto specx = quintic_roots(testor::kExample);
    REQUIRE(specx.real_roots.size() == 3);
    CHECK(specx.real_roots[0].value == Approx(-0.931924).margin(1e-5));
    CHECK(specx.real_roots[1].value == Approx(-0.678034).margin(1e-5));
    CHECK(specx.real_roots[2].value == Approx(2.79051).margin(1e-5));
}

TEST_CASE("quintic with c = 0 has the quintuple root at 0") {
    auto spec = quintic_roots({0.0, 0.0});
    REQUIRE(spec.real_roots.size() == 1);
    CHECK(spec.real_roots[0].value == Approx(0.0).margin(1e-6));
    CHECK(spec.real_roots[0].multiplicity == 5);
}

TEST_CASE("Vieta reconstruction and P(0) sign over random moduli") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uc(-6.0, 6.0);
    for (int it = 0; it < 120; ++it) {
        Modulus c{uc(rng), uc(rng)};
        auto spec = quintic_roots(c);

        // collect all roots with multiplicity
        std::vector<cplx> roots;
        for (const auto& r : spec.real_roots)
            for (int k = 0; k < r.multiplicity; ++k) roots.emplace_back(r.value, 0.0);
        for (const auto& q : spec.complex_pairs)
            for (int k = 0; k < q.multiplicity; ++k) {
                roots.emplace_back(q.re, q.im);
                roots.emplace_back(q.re, -q.im);
            }
        REQUIRE(roots.size() == 5);

        // expand prod (x - r) and compare with (1, 0, 0, 1.5 c2, 27 c1, -13.5 c1^2)
        std::vector<cplx> coef{1.0};
        for (const auto& r : roots) {
            std::vector<cplx> next(coef.size() + 1, 0.0);
            for (size_t k = 0; k < coef.size(); ++k) {
                next[k + 1] += coef[k];
                next[k] -= r * coef[k];
            }
            coef = next;
        }
        Poly p = quintic_poly(c);
        const double scale = p.coefficient_scale();
        for (int k = 0; k <= 5; ++k)
            CHECK(std::abs(coef[k] - cplx(p.c[k], 0.0)) < 1e-8 * scale);

        CHECK(p(0.0) <= 0.0);

        double sum = 0.0;
        for (const auto& r : roots) sum += r.real();
        CHECK(std::abs(sum) < 1e-7 * (1.0 + scale));
    }
}

TEST_CASE("momentum eigenvalues match the published example") {
    auto mom = momentum_eigenvalues(testor::kExample);
    REQUIRE(mom.kind == OrbitType::OT1);
    CHECK(mom.lambda[0].real() == Approx(-2.40462).margin(1e-4));
    CHECK(mom.lambda[1].real() == Approx(0.40614).margin(1e-4));
    CHECK(mom.lambda[2].real() == Approx(1.99848).margin(1e-4));
    // ordering contract
    CHECK(mom.lambda[0].real() == -(mom.lambda[1].real() + mom.lambda[2].real()));
}

TEST_CASE("momentum eigenvalue conventions and symmetric functions") {
    SECTION("triple root at c = (0, -9)") {
        auto mom = momentum_eigenvalues({0.0, -9.0});
        CHECK(mom.kind == OrbitType::OT3);
        for (const auto& l : mom.lambda) CHECK(std::abs(l) < 1e-6);
    }
    SECTION("Delta1 closed form at (-1, -9)") {
        CHECK(discriminant1({-1.0, -9.0}) == Approx(864.0));
        CHECK(momentum_eigenvalues({-1.0, -9.0}).kind == OrbitType::OT1);
    }
    SECTION("elementary symmetric functions match Q_c") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> uc(-5.0, 5.0);
        for (int it = 0; it < 80; ++it) {
            Modulus c{uc(rng), uc(rng)};
            auto mom = momentum_eigenvalues(c);
            cplx s1 = mom.lambda[0] + mom.lambda[1] + mom.lambda[2];
            cplx s2 = mom.lambda[0] * mom.lambda[1] + mom.lambda[0] * mom.lambda[2] +
                      mom.lambda[1] * mom.lambda[2];
            cplx s3 = mom.lambda[0] * mom.lambda[1] * mom.lambda[2];
            double scale = 1.0 + std::abs(27.0 + 3.0 * c.c2) + 6.0 * std::abs(c.c1);
            CHECK(std::abs(s1) < 1e-7 * scale);
            CHECK(std::abs(s2 - cplx(6.0 * c.c1, 0.0)) < 1e-7 * scale);
            CHECK(std::abs(s3 + cplx(27.0 + 3.0 * c.c2, 0.0)) < 1e-7 * scale);
        }
    }
}

TEST_CASE("phase and region classification of the probe moduli") {
    auto cl1 = classify({-2.0, 1.0});
    CHECK(cl1.phase == Phase::B);
    CHECK(cl1.region == Region::MPrimePlus);

    auto cl2 = classify({1.0 / 6.0, 8.0});
    CHECK(cl2.phase == Phase::B);
    CHECK(cl2.region == Region::MSecondPlus);

    auto cl3 = classify({1.0 / 6.0, -8.0});
    CHECK(cl3.phase == Phase::B);
    CHECK(cl3.region == Region::MThirdPlus);

    auto cl4 = classify({-6.0, -9.0});
    CHECK(cl4.phase == Phase::A);
    CHECK(cl4.region == Region::MPrimeMinus);

    auto cl5 = classify({4.0, -9.0});
    CHECK(cl5.phase == Phase::A);
    CHECK(cl5.region == Region::MSecondMinus);

    auto cl6 = classify({0.0, 5.0});
    CHECK(cl6.phase == Phase::C);
    CHECK(cl6.region == Region::Oy);
}

TEST_CASE("classification is locally constant off the boundary sets") {
    const Modulus probes[] = {{-2.0, 1.0}, {1.0 / 6.0, 8.0}, {4.0, -9.0}, testor::kExample};
    const double eps = 1e-6;
    for (const auto& c : probes) {
        auto base = classify(c);
        for (auto [dx, dy] : {std::pair{eps, 0.0}, {-eps, 0.0}, {0.0, eps}, {0.0, -eps}}) {
            auto moved = classify({c.c1 + dx, c.c2 + dy});
            CHECK(moved.phase == base.phase);
            CHECK(moved.orbit == base.orbit);
            CHECK(moved.region == base.region);
        }
    }
}

TEST_CASE("separatrix landmarks") {
    // cusp at t = pi/4
    auto cusp = separatrix(pi / 4.0);
    CHECK(cusp[0] == Approx(0.8 * std::pow(1.2, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(cusp[1] == Approx(-9.6).epsilon(1e-12));

    // horizontal inflection point at t = pi/2
    auto infl = separatrix(pi / 2.0);
    CHECK(std::abs(infl[0]) < 1e-12);
    CHECK(infl[1] == Approx(-9.0).epsilon(1e-12));

    // divergence near the excluded direction
    auto [lo, hi] = separatrix_domain();
    auto near_end = separatrix(hi - 1e-8);
    CHECK(std::abs(near_end[0]) > 1e9);

    CHECK_THROWS_AS(separatrix(lo - 0.1), DomainError);
}

TEST_CASE("separatrix points classify as phase C with region Xi") {
    for (double t : {1.0, 1.7, 2.1}) {
        auto p = separatrix(t);
        auto cl = classify({p[0], p[1]});
        CHECK(cl.phase == Phase::C);
        CHECK(cl.region == Region::Xi);
        CHECK(cl.separatrix_distance < 1e-6);
    }
}

TEST_CASE("generality margins") {
    auto g0 = is_general({0.0, -9.0});
    CHECK_FALSE(g0.general);
    CHECK(g0.delta1 == 0.0);

    auto gx = is_general(testor::kExample);
    CHECK(gx.general);
    CHECK(gx.delta1 == Approx(388.3642113577933).epsilon(1e-12));
    CHECK(gx.delta2 == Approx(269.9493954441491).epsilon(1e-12));

    auto g18 = is_general({0.0, -18.0});
    CHECK_FALSE(g18.general);
    CHECK(g18.delta2 == 0.0);
}

TEST_CASE("lower boundary curve of B1 lies on Delta1 = 0") {
    for (double t : {1.7, 1.9, 2.1, 2.25}) {
        auto p = crtwist::lower_boundary(t);
        double d1 = discriminant1({p[0], p[1]});
        CHECK(std::abs(d1) < 1e-9 * discriminant1_scale({p[0], p[1]}));
    }
}

TEST_CASE("curve classes follow the phase/orbit grid") {
    auto clB1 = classify(testor::kExample);
    REQUIRE(clB1.orbit == OrbitType::OT1);
    REQUIRE(clB1.curve_classes.size() == 2);
    CHECK(clB1.curve_classes[0] == CurveClass::BPrime1);
    CHECK(clB1.curve_classes[1] == CurveClass::BSecond1);

    auto clA = classify({4.0, -9.0});
    REQUIRE(clA.curve_classes.size() == 1);
    CHECK((clA.curve_classes[0] == CurveClass::A1 || clA.curve_classes[0] == CurveClass::A2 ||
           clA.curve_classes[0] == CurveClass::A3));
}
