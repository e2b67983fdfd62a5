#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "crtwist/closure.hpp"
#include "crtwist/common.hpp"
#include "crtwist/linalg.hpp"

// Discrete global invariants of closed critical curves: quantum numbers,
// CR spin, wave number, CR turning number, and trace, with winding-degree
// computations as the independent cross-check of the closed-form branches.

namespace crtwist {

struct QuantumNumbers {
    Rational q1, q3;
    Rational q2;           // representative of -(q1+q3) mod Z chosen in (-1, 0]
    long long n = 0;       // lcm(n1, n3); order of the monodromy
    long long s1 = 0, s3 = 0;
    Rational spin;         // 1 or 1/3
    long long wave_number = 0;
    long long turning = 0;
    long long trace = 0;
    int eps_branch = +1;   // which closed-form branch produced (turning, trace)
};

// Closed-form discrete invariants from the quantum numbers. The eps = +1
// branch uses (w, tr) = (s3 m3, n_gamma (q1 - q3)); eps = -1 uses
// (s2 m2, n_gamma (q1 - q2)) with the q2 representative in (-1, 0].
inline QuantumNumbers discrete_invariants(Rational q1, Rational q3, int eps = +1) {
    if (q1.den <= 0 || q3.den <= 0) throw DomainError("discrete_invariants: reduced rationals required");
    QuantumNumbers out;
    out.q1 = q1;
    out.q3 = q3;
    out.eps_branch = eps;
    out.n = std::lcm(q1.den, q3.den);
    out.s1 = out.n / q1.den;
    out.s3 = out.n / q3.den;

    // q2 = -(q1+q3) shifted into (-1, 0]
    Rational q2raw = make_rational(-(q1.num * (out.n / q1.den) + q3.num * (out.n / q3.den)), out.n);
    long long shift = static_cast<long long>(std::ceil(q2raw.value()));
    out.q2 = make_rational(q2raw.num - shift * q2raw.den, q2raw.den);

    const long long m1s1 = q1.num * out.s1;
    const long long m3s3 = q3.num * out.s3;
    auto mod3 = [](long long v) { return ((v % 3) + 3) % 3; };
    const bool spin_third = out.n % 3 == 0 && mod3(m1s1) == mod3(m3s3) && mod3(m1s1) != 0;
    out.spin = spin_third ? Rational{1, 3} : Rational{1, 1};
    out.wave_number = spin_third ? out.n / 3 : out.n;

    if (eps == +1) {
        out.turning = out.s3 * q3.num;
        // tr = n_gamma (q1 - q3); exact integer arithmetic
        long long num = q1.num * q3.den - q3.num * q1.den;
        long long den = q1.den * q3.den;
        if ((out.wave_number * num) % den != 0)
            throw DomainError("discrete_invariants: n_gamma (q1 - q3) is not an integer");
        out.trace = out.wave_number * num / den;
    } else {
        long long s2 = out.n / out.q2.den;
        out.turning = s2 * out.q2.num;
        long long num = q1.num * out.q2.den - out.q2.num * q1.den;
        long long den = q1.den * out.q2.den;
        if ((out.wave_number * num) % den != 0)
            throw DomainError("discrete_invariants: n_gamma (q1 - q2) is not an integer");
        out.trace = out.wave_number * num / den;
    }
    return out;
}

// Degree of a sampled loop in C \ {0} by phase unwrapping. Samples must be
// dense enough that consecutive phase jumps stay below pi/2.
inline long long winding_degree(std::span<const cplx> samples, bool closed,
                                double* residual_out = nullptr) {
    if (samples.size() < 2) throw DomainError("winding_degree: need at least two samples");
    double total = 0.0;
    for (size_t k = 0; k + 1 < samples.size(); ++k) {
        if (std::abs(samples[k]) < 1e-8)
            throw DegeneracyError("winding_degree: sample within 1e-8 of zero");
        double jump = std::arg(samples[k + 1] / samples[k]);
        if (std::abs(jump) >= 0.5 * pi)
            throw UndersamplingError("winding_degree: phase jump of " + std::to_string(jump) +
                                     " at sample " + std::to_string(k));
    total += jump;
    }
    if (std::abs(samples.back()) < 1e-8)
        throw DegeneracyError("winding_degree: sample within 1e-8 of zero");
    double turns = total / (2.0 * pi);
    double residual = std::abs(turns - std::round(turns));
    if (residual_out) *residual_out = residual;
    if (closed && residual >= 0.1)
        throw AccuracyError("winding_degree: rounding residual " + std::to_string(residual) +
                            " exceeds 0.1 for a closed loop");
    return static_cast<long long>(std::llround(turns));
}

// Linking number of a closed polyline with the upward-oriented Oz-axis:
// the winding of (x, y) around the origin.
inline long long trace_linking(std::span<const std::array<double, 3>> polyline,
                               double min_axis_margin = 1e-8) {
    std::vector<cplx> xy;
    xy.reserve(polyline.size());
    for (const auto& p : polyline) {
        double r = std::hypot(p[0], p[1]);
        if (r < min_axis_margin)
            throw DegeneracyError("trace_linking: polyline violates the Oz-axis margin");
        xy.emplace_back(p[0], p[1]);
    }
    return winding_degree(xy, /*closed=*/true);
}

} // namespace crtwist
