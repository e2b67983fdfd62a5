#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crtwist/common.hpp"
#include "crtwist/moduli.hpp"
#include "crtwist/quadrature.hpp"

// Parametrization of the B1 components by rectangles, the P-map
// (t,s) -> (P1, P3), and the differential-evolution search for moduli whose
// quantum numbers hit prescribed rationals.

namespace crtwist {

struct Rational {
    long long num = 0;
    long long den = 1; // > 0, gcd(|num|, den) = 1

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

inline Rational make_rational(long long num, long long den) {
    if (den == 0) throw DomainError("make_rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {num, den};
}

// Best continued-fraction convergent m/n with n <= max_denominator and
// |x - m/n| <= tol; nullopt when no convergent qualifies.
inline std::optional<Rational> rationalize(double x, long long max_denominator, double tol) {
    if (!std::isfinite(x) || max_denominator < 1) return std::nullopt;
    long long pn = 1, pd = 0; // previous convergent
    long long cn = static_cast<long long>(std::floor(x)), cd = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (std::abs(x - static_cast<double>(cn) / cd) <= tol)
            return make_rational(cn, cd);
        if (frac < 1e-18) break;
        double inv = 1.0 / frac;
        long long a = static_cast<long long>(std::floor(inv));
        frac = inv - std::floor(inv);
        long long nn = a * cn + pn, nd = a * cd + pd;
        if (nd > max_denominator || nd < 0) break;
        pn = cn;
        pd = cd;
        cn = nn;
        cd = nd;
    }
    if (std::abs(x - static_cast<double>(cn) / cd) <= tol && cd <= max_denominator)
        return make_rational(cn, cd);
    return std::nullopt;
}

enum class Branch { Minus, Plus };

// Parameter t' of the tangential contact between the separatrix and the
// Delta1 = 0 curve, computed as the root of xi1(t) = -cbrt(1458)
// (the contact point is (-1458^(1/3), 63)).
inline double branch_split_parameter() {
    static const double tp = [] {
        const double target = -std::cbrt(1458.0);
        double a = 2.2, b = 2.4;
        auto g = [&](double t) { return separatrix(t)[0] - target; };
        double fa = g(a);
        for (int it = 0; it < 200; ++it) {
            double m = 0.5 * (a + b);
            double fm = g(m);
            if ((fa < 0.0) == (fm < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
            if (b - a < 1e-16) break;
        }
        return 0.5 * (a + b);
    }();
    return tp;
}

inline std::pair<double, double> branch_interval(Branch br) {
    const double tp = branch_split_parameter();
    if (br == Branch::Minus) return {0.5 * pi, tp};
    return {tp, pi + std::atan(separatrix_excluded_slope())};
}

// Lower boundary point p(t) on Delta1 = 0 under the separatrix point xi~(t).
inline std::array<double, 2> lower_boundary(double t) {
    auto xi = separatrix(t);
    if (!(xi[0] < 0.0)) throw DomainError("lower_boundary: xi1(t) must be negative");
    return {xi[0], (4.0 * std::sqrt(-2.0 * xi[0] * xi[0] * xi[0]) - 27.0) / 3.0};
}

// psi_branch(t, s): affine interpolation between the Delta1 = 0 boundary
// (s=0) and the separatrix (s=1); parametrizes B1^-/B1^+.
inline Modulus psi(Branch br, double t, double s) {
    auto [lo, hi] = branch_interval(br);
    if (!(t > lo && t < hi))
        throw DomainError("psi: t outside the branch interval (" + std::to_string(lo) + ", " +
                          std::to_string(hi) + ")");
    auto xi = separatrix(t);
    auto p = lower_boundary(t);
    // first components coincide, so c1 depends on t only
    return {(xi[0] - p[0]) * s + p[0], (xi[1] - p[1]) * s + p[1]};
}

struct PmapSample {
    double t = 0.0, s = 0.0;
    Modulus c;
    double p1 = 0.0, p3 = 0.0;
    double delta1 = 0.0, delta2 = 0.0;
    bool exceptional = false; // on the Delta2 = 0 band; p1/p3 not evaluated
};

// Composition psi -> spectra -> quantum integrals.
inline PmapSample pmap(Branch br, double t, double s, const Tolerances& tol = default_tolerances()) {
    PmapSample out;
    out.t = t;
    out.s = s;
    out.c = psi(br, t, s);
    out.delta1 = discriminant1(out.c);
    out.delta2 = discriminant2(out.c);
    if (std::abs(out.delta2) <= tol.guard_band * discriminant2_scale(out.c)) {
        out.exceptional = true;
        return out;
    }
    QuinticSpectrum spec = quintic_roots(out.c, tol);
    MomentumSpectrum mom = momentum_eigenvalues(out.c, tol);
    QuantumIntegrals qi = quantum_integrals(out.c, mom, spec, tol);
    out.p1 = qi.p1;
    out.p3 = qi.p3;
    return out;
}

struct SearchConfig {
    Branch branch = Branch::Minus;
    std::array<double, 4> rectangle{}; // t_lo, t_hi, s_lo, s_hi
    int population = 40;
    double mutation = 0.8;  // F
    double crossover = 0.9; // CR
    int max_generations = 300;
    std::uint64_t seed = 0;
    double target_delta = 1e-6;
};

struct SearchResult {
    bool found = false;
    double t = 0.0, s = 0.0;
    Modulus c;
    double delta = 0.0;
    double p1 = 0.0, p3 = 0.0;
    double delta1 = 0.0, delta2 = 0.0; // generality margins at the optimum
    int generations = 0;
    std::uint64_t evaluations = 0;
};

namespace detail {

struct Objective {
    Branch branch;
    double q1, q3;
    const Tolerances& tol;
    std::uint64_t count = 0;

    double operator()(double t, double s, PmapSample* sample = nullptr) {
        ++count;
        try {
            PmapSample ps = pmap(branch, t, s, tol);
            if (sample) *sample = ps;
            if (ps.exceptional) return 1e9; // +inf-equivalent penalty on the exceptional band
            return std::sqrt(sq(ps.p1 - q1) + sq(ps.p3 - q3));
        } catch (const Error&) {
            return 1e9;
        }
    }
};

} // namespace detail

// Differential evolution (rand/1/bin) over the rectangle, minimizing
// delta_q(p) = |P(p) - q|. Deterministic for a fixed config: the population
// is evaluated in index order with one shared RNG stream.
inline SearchResult search_modulus(Rational q1, Rational q3, const SearchConfig& cfg,
                                   const Tolerances& tol = default_tolerances()) {
    if (cfg.population < 8) throw DomainError("search_modulus: population must be at least 8");
    auto [blo, bhi] = branch_interval(cfg.branch);
    const double tlo = std::max(cfg.rectangle[0], blo + 1e-9), thi = std::min(cfg.rectangle[1], bhi - 1e-9);
    const double slo = cfg.rectangle[2], shi = cfg.rectangle[3];
    if (!(tlo < thi) || !(slo < shi))
        throw DomainError("search_modulus: rectangle is empty or outside the branch interval");

    detail::Objective obj{cfg.branch, q1.value(), q3.value(), tol};
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const int np = cfg.population;
    std::vector<std::array<double, 2>> pop(np);
    std::vector<double> fit(np);
    for (int i = 0; i < np; ++i) {
        pop[i] = {tlo + (thi - tlo) * u01(rng), slo + (shi - slo) * u01(rng)};
        fit[i] = obj(pop[i][0], pop[i][1]);
    }

    int best = static_cast<int>(std::min_element(fit.begin(), fit.end()) - fit.begin());
    int gen = 0;
    for (; gen < cfg.max_generations && fit[best] > cfg.target_delta; ++gen) {
        for (int i = 0; i < np; ++i) {
            int r1, r2, r3;
            do r1 = static_cast<int>(rng() % np); while (r1 == i);
            do r2 = static_cast<int>(rng() % np); while (r2 == i || r2 == r1);
            do r3 = static_cast<int>(rng() % np); while (r3 == i || r3 == r1 || r3 == r2);
            std::array<double, 2> v;
            for (int d = 0; d < 2; ++d) v[d] = pop[r1][d] + cfg.mutation * (pop[r2][d] - pop[r3][d]);
            int jrand = static_cast<int>(rng() % 2);
            std::array<double, 2> trial = pop[i];
            for (int d = 0; d < 2; ++d)
                if (d == jrand || u01(rng) < cfg.crossover) trial[d] = v[d];
            trial[0] = std::clamp(trial[0], tlo, thi);
            trial[1] = std::clamp(trial[1], slo, shi);
            double f = obj(trial[0], trial[1]);
            if (f <= fit[i]) {
                pop[i] = trial;
                fit[i] = f;
                if (f < fit[best]) best = i;
            }
        }
    }

    SearchResult out;
    out.t = pop[best][0];
    out.s = pop[best][1];
    out.generations = gen;
    out.evaluations = obj.count;
    PmapSample ps;
    out.delta = obj(out.t, out.s, &ps);
    out.c = ps.c;
    out.p1 = ps.p1;
    out.p3 = ps.p3;
    out.delta1 = ps.delta1;
    out.delta2 = ps.delta2;
    out.found = out.delta <= cfg.target_delta;
    return out;
}

// Gauss-Newton refinement of a search result (finite-difference Jacobian).
// Drives delta to quadrature accuracy; used where curve closure needs the
// quantum numbers pinned well beyond the stochastic search tolerance.
inline SearchResult refine_modulus(Rational q1, Rational q3, Branch branch, double t0, double s0,
                                   int max_iters = 16, const Tolerances& tol = default_tolerances()) {
    detail::Objective obj{branch, q1.value(), q3.value(), tol};
    auto [blo, bhi] = branch_interval(branch);
    double t = t0, s = s0;
    const double fh = 1e-7;
    for (int it = 0; it < max_iters; ++it) {
        PmapSample p0 = pmap(branch, t, s, tol);
        double r1 = p0.p1 - q1.value(), r3 = p0.p3 - q3.value();
        if (std::sqrt(r1 * r1 + r3 * r3) < 1e-13) break;
        PmapSample pt = pmap(branch, std::min(t + fh, bhi - 1e-9), s, tol);
        PmapSample pt2 = pmap(branch, std::max(t - fh, blo + 1e-9), s, tol);
        PmapSample ps2 = pmap(branch, t, s + fh, tol);
        PmapSample ps3 = pmap(branch, t, s - fh, tol);
        double j11 = (pt.p1 - pt2.p1) / (pt.t - pt2.t), j12 = (ps2.p1 - ps3.p1) / (2.0 * fh);
        double j21 = (pt.p3 - pt2.p3) / (pt.t - pt2.t), j22 = (ps2.p3 - ps3.p3) / (2.0 * fh);
        double detj = j11 * j22 - j12 * j21;
        if (std::abs(detj) < 1e-14) break;
        double dt = (j22 * r1 - j12 * r3) / detj;
        double ds = (-j21 * r1 + j11 * r3) / detj;
        t = std::clamp(t - dt, blo + 1e-9, bhi - 1e-9);
        s = s - ds;
    }
    SearchResult out;
    out.t = t;
    out.s = s;
    PmapSample ps;
    out.delta = obj(t, s, &ps);
    out.c = ps.c;
    out.p1 = ps.p1;
    out.p3 = ps.p3;
    out.delta1 = ps.delta1;
    out.delta2 = ps.delta2;
    out.evaluations = obj.count;
    out.found = out.delta < 1e-10;
    return out;
}

} // namespace crtwist
