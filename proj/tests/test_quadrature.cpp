#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crtwist/quadrature.hpp"
#include "oracles.hpp"

using namespace crtwist;
using Catch::Approx;

TEST_CASE("arcsine integral through the cycle engine") {
    // int_{-1}^{1} dx / sqrt(1 - x^2) = pi, i.e. R = 1
    Poly one{{1.0}};
    double v = cycle_integral([](double) { return 1.0; }, -1.0, 1.0, one);
    CHECK(v == Approx(pi).epsilon(1e-12));
}

TEST_CASE("tail substitution recovers int_1^inf x^(-3/2) = 2") {
    // escape-time tail on P(x) = x^5 from e... exercised directly through the
    // strain integrand with a synthetic monic quintic: int_e^inf tau dtau / sqrt(tau^5)
    // = int_e^inf tau^(-3/2) = 2 / sqrt(e). With e = 1 the halves must sum to 2.
    Poly p{{0.0, 0.0, 0.0, 0.0, 0.0, 1.0}}; // x^5
    Poly s = p.deflate(1.0);                // but 1 is not a root of x^5; build by hand instead
    (void)s;
    // near part on [1, 2]: P = (tau-1) S with S = x^5/(x-1) is not polynomial;
    // use the generic edge engine with the factored integrand directly:
    // int_1^2 tau dtau / sqrt(tau^5) with the known antiderivative.
    double near = quad::adaptive_gl([](double x) { return std::pow(x, -1.5); }, 1.0, 2.0, 1e-12);
    double tail = quad::adaptive_gl(
        [](double u) {
            // u = 1/sqrt(tau) transform of int_2^inf tau^(-3/2) dtau = int_0^{1/sqrt2} 2 du
            return 2.0;
        },
        0.0, 1.0 / std::sqrt(2.0), 1e-12);
    CHECK(near + tail == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("substitution engine agrees with offset-endpoint adaptive quadrature") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        double a = -1.0 + 0.5 * uc(rng);
        double b = 1.0 + 0.5 * uc(rng);
        // random cubic R positive on [a,b]
        Poly r{{2.5 + uc(rng), 0.3 * uc(rng), 0.3 * uc(rng), 0.1 * uc(rng)}};
        bool pos = true;
        for (int k = 0; k <= 100; ++k)
            if (r(a + (b - a) * k / 100.0) <= 0.1) pos = false;
        if (!pos) continue;

        auto f = [&](double x) { return std::cos(x) + 0.2 * x; };
        double engine = cycle_integral(f, a, b, r);
        double oracle = testor::offset_quadrature(
            [&](double x) { return f(x) / std::sqrt((x - a) * (b - x) * r(x)); }, a, b, 1e-10, 1e-13);
        CHECK(engine == Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("half period of the Example modulus") {
    auto spec = quintic_roots(testor::kExample);
    double omega = half_period(testor::kExample, spec);
    CHECK(omega == Approx(0.732307).margin(1e-5));
    CHECK(omega == Approx(0.7323070362100321).epsilon(1e-9));
}

TEST_CASE("half period cross-checked against offset quadrature for (1/6, 8)") {
    Modulus c{1.0 / 6.0, 8.0};
    auto spec = quintic_roots(c);
    double omega = half_period(c, spec);
    CHECK(omega > 0.0);

    Poly p = quintic_poly(c);
    double e1 = spec.real_roots[0].value, e2 = spec.real_roots[1].value;
    double oracle = std::sqrt(1.5) * std::abs(testor::offset_quadrature(
                        [&](double x) { return x / std::sqrt(p(x)); }, e1, e2, 1e-10, 1e-13));
    CHECK(omega == Approx(oracle).epsilon(1e-6));
}

TEST_CASE("half period rejects phase-A moduli") {
    Modulus c{4.0, -9.0};
    auto spec = quintic_roots(c);
    CHECK_THROWS_AS(half_period(c, spec), DomainError);
}

TEST_CASE("escape time for unbounded classes") {
    // phase A
    Modulus cA{4.0, -9.0};
    auto specA = quintic_roots(cA);
    double om = escape_time(cA, specA.real_roots[0].value);
    CHECK(om > 0.0);
    CHECK(om == Approx(1.817226266415854).epsilon(1e-9));

    // Fig. 4 modulus
    Modulus cF{0.5, -4.8};
    auto specF = quintic_roots(cF);
    double omF = escape_time(cF, specF.real_roots[0].value);
    CHECK(omF > 0.0);
    CHECK(omF == Approx(2.7866311796467014).epsilon(1e-9));
}

TEST_CASE("quantum integrals of the Example modulus") {
    auto spec = quintic_roots(testor::kExample);
    auto mom = momentum_eigenvalues(testor::kExample);
    auto qi = quantum_integrals(testor::kExample, mom, spec);

    CHECK(qi.p1 == Approx(-2.0 / 15.0).margin(2e-8));
    CHECK(qi.p3 == Approx(-10.0 / 21.0).margin(5e-8));
    CHECK(qi.sum_residual < 1e-10);
}

TEST_CASE("quantum integral sum is an integer over random B1 moduli") {
    auto moduli = testor::random_b1_moduli(10, 321);
    for (const auto& c : moduli) {
        auto spec = quintic_roots(c);
        auto mom = momentum_eigenvalues(c);
        auto qi = quantum_integrals(c, mom, spec);
        CHECK(qi.sum_residual < 1e-7);
    }
}

TEST_CASE("quantum integrals are stable under node refinement") {
    // plateau check: tighter plateau tolerance must not move the values
    auto spec = quintic_roots(testor::kExample);
    auto mom = momentum_eigenvalues(testor::kExample);
    Tolerances t1;
    t1.quad_tol = 1e-9;
    Tolerances t2;
    t2.quad_tol = 1e-13;
    auto a = quantum_integrals(testor::kExample, mom, spec, t1);
    auto b = quantum_integrals(testor::kExample, mom, spec, t2);
    CHECK(std::abs(a.p1 - b.p1) < 1e-9);
    CHECK(std::abs(a.p3 - b.p3) < 1e-9);
}

TEST_CASE("incomplete strain endpoints") {
    auto spec = quintic_roots(testor::kExample);
    double e1 = spec.real_roots[0].value, e2 = spec.real_roots[1].value;
    double omega = half_period(testor::kExample, spec);

    CHECK(incomplete_strain(testor::kExample, e2, e2) == 0.0);

    double full = incomplete_strain(testor::kExample, e2, e1);
    CHECK(std::abs(full) == Approx(omega).epsilon(1e-9));

    // half-open piece ending strictly inside
    double mid = 0.5 * (e1 + e2);
    double part = incomplete_strain(testor::kExample, e2, mid);
    CHECK(std::abs(part) < omega);
    CHECK(std::abs(part) > 0.0);

    // interval crossing a root interiorly is rejected
    CHECK_THROWS_AS(incomplete_strain(testor::kExample, e1 - 0.05, e2), DomainError);
}

TEST_CASE("integral spec dispatcher") {
    IntegralSpec is;
    is.kind = IntegralSpec::Kind::CompleteCycle;
    is.integrand = IntegralSpec::Integrand::Strain;
    is.modulus = testor::kExample;
    CHECK(evaluate(is) == Approx(0.7323070362100321).epsilon(1e-9));

    is.integrand = IntegralSpec::Integrand::Phase;
    is.eigenvalue = momentum_eigenvalues(testor::kExample).lambda[0];
    CHECK(evaluate(is) == Approx(-2.0 / 15.0).margin(2e-8));
}
