#pragma once

// Test-only oracles, independent of the substitution-based quadrature and
// of the production solvers they check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "crtwist/closure.hpp"
#include "crtwist/moduli.hpp"

namespace testor {

// Adaptive Simpson on [a, b]; integrands may be singular at the endpoints,
// in which case callers pass offset endpoints.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 60) {
    struct Rec {
        const std::function<double(double)>& f;
        double run(double a, double m, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const {
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            double flm = f(lm), frm = f(rm);
            double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return run(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   run(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    } rec{f};
    double m = 0.5 * (a + b), fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec.run(a, m, b, fa, fm, fb, whole, tol, depth);
}

// Endpoint-offset oracle for integrals with inverse-square-root endpoint
// singularities: integrate on [a+off, b-off] and refine the offset.
inline double offset_quadrature(const std::function<double(double)>& f, double a, double b,
                                double offset = 1e-10, double tol = 1e-12) {
    return adaptive_simpson(f, a + offset, b - offset, tol);
}

// Random general moduli in B1^- through the rectangle parametrization.
inline std::vector<crtwist::Modulus> random_b1_moduli(int count, unsigned seed,
                                                      std::vector<std::pair<double, double>>* params = nullptr) {
    std::mt19937 rng(seed);
    auto [tlo, thi] = crtwist::branch_interval(crtwist::Branch::Minus);
    std::uniform_real_distribution<double> ut(tlo + 0.05, thi - 0.05);
    std::uniform_real_distribution<double> us(0.08, 0.92);
    std::vector<crtwist::Modulus> out;
    while (static_cast<int>(out.size()) < count) {
        double t = ut(rng), s = us(rng);
        crtwist::Modulus c = crtwist::psi(crtwist::Branch::Minus, t, s);
        auto gen = crtwist::is_general(c);
        if (!gen.general) continue;
        out.push_back(c);
        if (params) params->push_back({t, s});
    }
    return out;
}

inline const crtwist::Modulus kExample{-0.8284243304411575, -8.349417691746162};

} // namespace testor
