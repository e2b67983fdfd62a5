#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "crtwist/common.hpp"
#include "crtwist/moduli.hpp"
#include "crtwist/polynomial.hpp"

// Hyperelliptic integrals with inverse-square-root endpoint singularities
// removed analytically before any nodes are placed:
//   * complete cycles  -- cosine substitution over [root, root]
//   * one singular end -- sin^2 substitution
//   * improper tails   -- u = 1/sqrt(tau), integrand ~ tau^(-3/2)
// After substitution every integrand is analytic, so Gauss-Legendre with
// node doubling converges to machine precision.
//
// Sign conventions: the paper states omega with a sign(e1) prefix that does
// not produce a positive value on either branch; all published quantities
// are reproduced by taking the integral along the direction of motion.
// That convention is centralized here: half_period returns
// sqrt(3/2)*|int tau/sqrt(P)| and quantum integrals integrate from e2 to e1.

namespace crtwist {

namespace quad {

inline const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::pair<double, double>> nw(n);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        // Newton on P_n with the Tricomi initial guess
        double x = std::cos(pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nw[k] = {-x, w};
        nw[n - 1 - k] = {x, w};
    }
    return cache.emplace(n, std::move(nw)).first->second;
}

// integral of g over [a,b] by Gauss-Legendre with node doubling until the
// relative plateau tol is reached
template <class G>
double adaptive_gl(G&& g, double a, double b, double tol, int n0 = 64, int nmax = 8192) {
    double prev = 0.0;
    bool have_prev = false;
    for (int n = n0; n <= nmax; n *= 2) {
        const auto& nw = gauss_legendre(n);
        const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
        double s = 0.0;
        for (const auto& [x, w] : nw) s += w * g(mid + hw * x);
        s *= hw;
        if (have_prev && std::abs(s - prev) <= tol * (1.0 + std::abs(s))) return s;
        prev = s;
        have_prev = true;
    }
    throw NumericalError("adaptive_gl: no convergence plateau, last delta vs tolerance exceeded");
}

} // namespace quad

struct IntegralSpec {
    enum class Kind { CompleteCycle, Incomplete, ImproperTail } kind;
    enum class Integrand { Strain, Phase } integrand = Integrand::Strain;
    double a = 0.0;
    double b = 0.0; // ignored for ImproperTail
    Modulus modulus;
    cplx eigenvalue = 0.0; // for Phase
};

// int_a^b f(tau) / sqrt((tau-a)(b-tau) R(tau)) dtau with R > 0 on [a,b],
// via tau = mid + hw cos(theta):  = int_0^pi f(tau(th)) / sqrt(R(tau(th))) dth
template <class F>
double cycle_integral(F&& f, double a, double b, const Poly& r,
                      const Tolerances& tol = default_tolerances()) {
    if (!(a < b)) throw DomainError("cycle_integral: endpoints must satisfy a < b");
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    return quad::adaptive_gl(
        [&](double th) {
            double tau = mid + hw * std::cos(th);
            double rv = r(tau);
            if (rv <= 0.0) throw SingularIntegrandError("cycle_integral: deflated factor not positive inside cycle");
            return f(tau) / std::sqrt(rv);
        },
        0.0, pi, tol.quad_tol);
}

// int over [e,b] of f / sqrt((tau-e) S(tau)) with a simple root at e,
// via tau = e + (b-e) sin^2(theta)
template <class F>
double edge_integral(F&& f, double e, double b, const Poly& s,
                     const Tolerances& tol = default_tolerances()) {
    if (!(e < b)) throw DomainError("edge_integral: endpoints must satisfy e < b");
    const double len = b - e;
    return quad::adaptive_gl(
        [&](double th) {
            double sn = std::sin(th);
            double tau = e + len * sn * sn;
            double sv = s(tau);
            if (sv <= 0.0) throw SingularIntegrandError("edge_integral: deflated factor not positive");
            return 2.0 * std::sqrt(len) * f(tau) * std::cos(th) / std::sqrt(sv);
        },
        0.0, 0.5 * pi, tol.quad_tol);
}

namespace detail {

inline void require_phase_b(const QuinticSpectrum& spec, const char* who) {
    if (spec.simple_real_count() != 3 || spec.has_multiple_real_root())
        throw DomainError(std::string(who) + ": modulus is not of phase B (three simple real roots required)");
}

// lowest pair (e1, e2) of the three real roots
inline std::pair<double, double> lower_pair(const QuinticSpectrum& spec) {
    return {spec.real_roots[0].value, spec.real_roots[1].value};
}

} // namespace detail

// Half-period of the twist for phase-B moduli on the compact phase-curve
// component: omega = sqrt(3/2) * |int_{e1}^{e2} tau dtau / sqrt(P_c)| > 0.
inline double half_period(const Modulus& c, const QuinticSpectrum& spec,
                          const Tolerances& tol = default_tolerances()) {
    detail::require_phase_b(spec, "half_period");
    auto [e1, e2] = detail::lower_pair(spec);
    if (!(e1 * e2 > 0.0))
        throw DomainError("half_period: lowest roots must be both negative or both positive");
    Poly r = quintic_poly(c).deflate(e1).deflate(e2);
    for (auto& v : r.c) v = -v; // P = (tau-e1)(e2-tau) R with R > 0 inside
    double integral = cycle_integral([](double tau) { return tau; }, e1, e2, r, tol);
    double omega = std::sqrt(1.5) * std::abs(integral);
    if (!(omega > 0.0)) throw Error("half_period: nonpositive result");
    return omega;
}

// Escape time for unbounded classes: omega = sqrt(3/2) int_e^inf tau/sqrt(P).
// Split at 2e; the near part uses the sin^2 substitution, the tail uses
// u = 1/sqrt(tau) (monic quintic => integrand 2/sqrt(1 + p4 u^2 + ... + p0 u^10)).
inline double escape_time(const Modulus& c, double e, const Tolerances& tol = default_tolerances()) {
    Poly p = quintic_poly(c);
    const double scale = p.coefficient_scale();
    if (std::abs(p(e)) > tol.root_residual * scale * 10.0)
        throw DomainError("escape_time: endpoint is not a root of P_c");
    if (!(e > 0.0)) throw DomainError("escape_time: expected a positive simple root");
    Poly s = p.deflate(e);
    if (!(s(e) > 0.0))
        throw DomainError("escape_time: P_c not increasing through the root (degenerate case)");

    double near = edge_integral([](double tau) { return tau; }, e, 2.0 * e, s, tol);

    const auto& pc = p.c;
    double tail = quad::adaptive_gl(
        [&](double u) {
            double u2 = u * u;
            double g = pc[5] + u2 * (pc[4] + u2 * (pc[3] + u2 * (pc[2] + u2 * (pc[1] + u2 * pc[0]))));
            if (g <= 0.0) throw DomainError("escape_time: P_c not positive on the tail");
            return 2.0 / std::sqrt(g);
        },
        0.0, 1.0 / std::sqrt(2.0 * e), tol.quad_tol);

    return std::sqrt(1.5) * (near + tail);
}

struct QuantumIntegrals {
    double p1, p2, p3;
    double sum_residual; // |p1+p2+p3 - nearest integer|
};

// Complete hyperelliptic integrals P_j = (1/2pi) phi_j(2 omega) over the
// compact cycle [e1, e2], for general type-B1 moduli (all eigenvalues real).
inline QuantumIntegrals quantum_integrals(const Modulus& c, const MomentumSpectrum& mom,
                                          const QuinticSpectrum& spec,
                                          const Tolerances& tol = default_tolerances()) {
    detail::require_phase_b(spec, "quantum_integrals");
    if (mom.kind != OrbitType::OT1)
        throw DomainError("quantum_integrals: modulus is not of orbit type 1");
    auto [e1, e2] = detail::lower_pair(spec);
    const double lo2 = std::min(e1 * e1, e2 * e2), hi2 = std::max(e1 * e1, e2 * e2);
    if (e1 * e2 <= 0.0)
        throw SingularIntegrandError("quantum_integrals: tau vanishes inside the integration range");

    Poly r = quintic_poly(c).deflate(e1).deflate(e2);
    for (auto& v : r.c) v = -v;

    double p[3];
    for (int j = 0; j < 3; ++j) {
        const double lj = mom.lambda[j].real();
        if (3.0 * lj >= lo2 - tol.guard_band && 3.0 * lj <= hi2 + tol.guard_band)
            throw SingularIntegrandError(
                "quantum_integrals: denominator tau(3 lambda_j - tau^2) vanishes in range (non-general modulus)");
        auto f = [&](double tau) {
            double num = 3.0 * c.c1 * lj - (4.0 * c.c1 + lj * lj) * tau * tau + 3.0 * tau * tau * tau;
            return num / (tau * (3.0 * lj - tau * tau));
        };
        // P_j = (1/pi) sqrt(3/2) int_{e2}^{e1} f/sqrt(P) = -(1/pi) sqrt(3/2) int_{e1}^{e2}
        p[j] = -std::sqrt(1.5) / pi * cycle_integral(f, e1, e2, r, tol);
    }
    QuantumIntegrals out{p[0], p[1], p[2], 0.0};
    double s = p[0] + p[1] + p[2];
    out.sum_residual = std::abs(s - std::round(s));
    return out;
}

// Incomplete strain integral h_c = sqrt(3/2) int u du / sqrt(P_c(u)) over
// [tau_from, tau_to]; at most one endpoint may sit on a simple root.
inline double incomplete_strain(const Modulus& c, double tau_from, double tau_to,
                                const Tolerances& tol = default_tolerances()) {
    if (tau_from == tau_to) return 0.0;
    Poly p = quintic_poly(c);
    QuinticSpectrum spec = quintic_roots(c, tol);

    const double lo = std::min(tau_from, tau_to), hi = std::max(tau_from, tau_to);
    const double sign = tau_from < tau_to ? 1.0 : -1.0;

    auto near_root = [&](double x) -> std::optional<double> {
        for (const auto& r : spec.real_roots)
            if (std::abs(x - r.value) <= tol.root_cluster * (1.0 + std::abs(r.value))) return r.value;
        return std::nullopt;
    };
    for (const auto& r : spec.real_roots) {
        const double pad = tol.root_cluster * (1.0 + std::abs(r.value));
        if (r.value > lo + pad && r.value < hi - pad)
            throw DomainError("incomplete_strain: interval crosses a root of P_c interiorly");
    }

    auto root_lo = near_root(lo), root_hi = near_root(hi);
    const auto f = [](double u) { return u; };

    double integral;
    if (root_lo && root_hi) {
        Poly r = p.deflate(*root_lo).deflate(*root_hi);
        for (auto& v : r.c) v = -v;
        integral = cycle_integral(f, *root_lo, *root_hi, r, tol);
    } else if (root_lo) {
        Poly s = p.deflate(*root_lo);
        integral = edge_integral(f, *root_lo, hi, s, tol);
    } else if (root_hi) {
        // mirror: u -> -(u) reverses orientation twice, so integrate the
        // reflected polynomial from the reflected root upward
        Poly refl;
        refl.c = p.c;
        for (size_t k = 1; k < refl.c.size(); k += 2) refl.c[k] = -refl.c[k];
        Poly s = refl.deflate(-*root_hi);
        integral = edge_integral([](double u) { return -u; }, -*root_hi, -lo, s, tol);
    } else {
        integral = quad::adaptive_gl(
            [&](double u) {
                double pv = p(u);
                if (pv <= 0.0) throw DomainError("incomplete_strain: P_c not positive inside the interval");
                return u / std::sqrt(pv);
            },
            lo, hi, tol.quad_tol);
    }
    return sign * std::sqrt(1.5) * integral;
}

inline double evaluate(const IntegralSpec& spec, const Tolerances& tol = default_tolerances()) {
    switch (spec.kind) {
        case IntegralSpec::Kind::CompleteCycle: {
            QuinticSpectrum qs = quintic_roots(spec.modulus, tol);
            if (spec.integrand == IntegralSpec::Integrand::Strain)
                return half_period(spec.modulus, qs, tol);
            MomentumSpectrum mom = momentum_eigenvalues(spec.modulus, tol);
            QuantumIntegrals qi = quantum_integrals(spec.modulus, mom, qs, tol);
            const double d1 = std::abs(spec.eigenvalue - mom.lambda[0]);
            const double d2 = std::abs(spec.eigenvalue - mom.lambda[1]);
            const double d3 = std::abs(spec.eigenvalue - mom.lambda[2]);
            return d1 <= d2 && d1 <= d3 ? qi.p1 : (d2 <= d3 ? qi.p2 : qi.p3);
        }
        case IntegralSpec::Kind::ImproperTail:
            return escape_time(spec.modulus, spec.a, tol);
        case IntegralSpec::Kind::Incomplete:
        default:
            return incomplete_strain(spec.modulus, spec.a, spec.b, tol);
    }
}

} // namespace crtwist
