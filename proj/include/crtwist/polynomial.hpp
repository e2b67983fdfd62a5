#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crtwist/common.hpp"

// Dense univariate polynomials (ascending coefficients) and an
// Ehrlich-Aberth simultaneous root finder. Chosen over a companion-matrix
// eigensolver: no initial guesses needed and clustered roots stay stable.

namespace crtwist {

struct Poly {
    std::vector<double> c; // c[k] multiplies x^k

    int degree() const { return static_cast<int>(c.size()) - 1; }

    double operator()(double x) const {
        double r = 0.0;
        for (int k = degree(); k >= 0; --k) r = r * x + c[k];
        return r;
    }

    cplx operator()(cplx x) const {
        cplx r = 0.0;
        for (int k = degree(); k >= 0; --k) r = r * x + c[k];
        return r;
    }

    Poly derivative() const {
        Poly d;
        if (c.size() <= 1) {
            d.c = {0.0};
            return d;
        }
        d.c.resize(c.size() - 1);
        for (size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * static_cast<double>(k);
        return d;
    }

    // Synthetic division by (x - r); remainder is discarded (caller ensures
    // r is a root, which avoids re-evaluating P near its zeros downstream).
    Poly deflate(double r) const {
        const int n = degree();
        Poly q;
        q.c.assign(n, 0.0);
        q.c[n - 1] = c[n];
        for (int k = n - 2; k >= 0; --k) q.c[k] = c[k + 1] + r * q.c[k + 1];
        return q;
    }

    double coefficient_scale() const {
        double s = 0.0;
        for (double v : c) s = std::max(s, std::abs(v));
        return std::max(s, 1.0);
    }
};

namespace detail {

inline cplx horner(const std::vector<cplx>& c, cplx x) {
    cplx r = 0.0;
    for (size_t k = c.size(); k-- > 0;) r = r * x + c[k];
    return r;
}

} // namespace detail

// Simultaneous roots of a monic polynomial with complex coefficients
// (ascending, coeffs.back() == 1). Throws NumericalError with the worst
// residual if the iteration fails to settle.
inline std::vector<cplx> aberth_roots(std::vector<cplx> coeffs, int max_iters = 400) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 1) return {};
    // normalize to monic
    cplx lead = coeffs.back();
    for (auto& v : coeffs) v /= lead;

    std::vector<cplx> dcoeffs(n);
    for (int k = 1; k <= n; ++k) dcoeffs[k - 1] = coeffs[k] * static_cast<double>(k);

    double radius = 0.0;
    for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(coeffs[k]));
    radius = 1.0 + radius; // Cauchy bound

    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * pi * k / n + 0.4;
        z[k] = std::polar(radius * 0.8, ang);
    }

    double scale = 0.0;
    for (const auto& v : coeffs) scale = std::max(scale, std::abs(v));
    const double target = 1e-14 * scale * std::pow(radius, n);

    double worst = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        bool all_ok = true;
        worst = 0.0;
        for (int k = 0; k < n; ++k) {
            cplx p = detail::horner(coeffs, z[k]);
            worst = std::max(worst, std::abs(p));
            if (std::abs(p) <= target) continue;
            all_ok = false;
            cplx dp = detail::horner(dcoeffs, z[k]);
            cplx w = (std::abs(dp) > 0.0) ? p / dp : cplx(1e-8, 1e-8);
            cplx s = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            cplx denom = 1.0 - w * s;
            z[k] -= (std::abs(denom) > 1e-300) ? w / denom : w;
        }
        if (all_ok) return z;
    }
    // Accept slow linear convergence at multiple roots if residuals are tiny.
    if (worst <= 1e-10 * scale * std::max(1.0, std::pow(radius, n))) return z;
    throw NumericalError("aberth_roots: no convergence, worst residual " + std::to_string(worst));
}

inline std::vector<cplx> aberth_roots(const Poly& p, int max_iters = 400) {
    std::vector<cplx> c(p.c.begin(), p.c.end());
    return aberth_roots(std::move(c), max_iters);
}

struct ClusteredRoot {
    cplx value;
    int multiplicity;
};

// Merge numerically coincident roots; separation threshold tol*(1+|root|).
inline std::vector<ClusteredRoot> cluster_roots(std::vector<cplx> roots, double tol) {
    std::vector<ClusteredRoot> out;
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        cplx sum = roots[i];
        int mult = 1;
        used[i] = true;
        bool grew = true;
        cplx center = roots[i];
        while (grew) {
            grew = false;
            for (size_t j = 0; j < roots.size(); ++j) {
                if (used[j]) continue;
                if (std::abs(roots[j] - center) < tol * (1.0 + std::abs(center))) {
                    sum += roots[j];
                    ++mult;
                    used[j] = true;
                    center = sum / static_cast<double>(mult);
                    grew = true;
                }
            }
        }
        out.push_back({center, mult});
    }
    return out;
}

} // namespace crtwist
