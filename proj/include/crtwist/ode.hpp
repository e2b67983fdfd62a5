#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "crtwist/common.hpp"

// Embedded Dormand-Prince 5(4) with the standard quartic dense output.
// Supports forward and backward integration, an early-stop predicate for
// blow-up truncation, and a per-accepted-step mutation hook used for
// Lie-group reprojection.

namespace crtwist {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0; // 0 -> automatic
    std::size_t max_steps = 20'000'000;
    bool allow_truncation = false; // step-size underflow stops instead of throwing
};

template <std::size_t N>
struct OdeSolution {
    using State = std::array<double, N>;

    struct Segment {
        double t0, h;
        State r1, r2, r3, r4, r5;
    };

    double t_begin = 0.0, t_end = 0.0;
    State y_end{};
    std::vector<Segment> segments;
    bool truncated = false;
    std::size_t accepted = 0, rejected = 0;

    State eval(double t) const {
        if (segments.empty()) throw Error("OdeSolution::eval: empty solution");
        // binary search for the covering segment (monotone t0 in either direction)
        const bool fwd = t_end >= t_begin;
        std::size_t lo = 0, hi = segments.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (fwd ? (segments[mid].t0 <= t) : (segments[mid].t0 >= t))
                lo = mid;
            else
                hi = mid - 1;
        }
        const Segment& seg = segments[lo];
        double th = (t - seg.t0) / seg.h;
        th = std::clamp(th, 0.0, 1.0);
        const double th1 = 1.0 - th;
        State y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = seg.r1[i] + th * (seg.r2[i] + th1 * (seg.r3[i] + th * (seg.r4[i] + th1 * seg.r5[i])));
        return y;
    }
};

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

} // namespace dopri

// f: void(double t, const State& y, State& dy)
// post_step: void(double t, State& y) applied after each accepted step (may
// mutate y slightly, e.g. group reprojection); pass nullptr when unused.
template <std::size_t N, class F>
OdeSolution<N> integrate_ode(
    F&& f, double t0, std::array<double, N> y0, double t1, const OdeOptions& opt = {},
    const std::function<bool(double, const std::array<double, N>&)>& stop_when = nullptr,
    const std::function<void(double, std::array<double, N>&)>& post_step = nullptr) {
    using namespace dopri;
    using State = std::array<double, N>;

    OdeSolution<N> sol;
    sol.t_begin = t0;
    if (t1 == t0) {
        sol.t_end = t0;
        sol.y_end = y0;
        return sol;
    }
    const double dir = t1 > t0 ? 1.0 : -1.0;

    State y = y0, k1, k2, k3, k4, k5, k6, k7, ytmp, y1;
    double t = t0;
    f(t, y, k1);

    auto err_norm = [&](const State& e, const State& ya, const State& yb) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sc = opt.atol + opt.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            s += sq(e[i] / sc);
        }
        return std::sqrt(s / N);
    };

    // automatic initial step (Hairer-style, simplified)
    double h = opt.initial_step;
    if (h == 0.0) {
        double dn0 = 0.0, dn1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sc = opt.atol + opt.rtol * std::abs(y[i]);
            dn0 += sq(y[i] / sc);
            dn1 += sq(k1[i] / sc);
        }
        dn0 = std::sqrt(dn0 / N);
        dn1 = std::sqrt(dn1 / N);
        h = (dn0 < 1e-10 || dn1 < 1e-10) ? 1e-6 : 0.01 * dn0 / dn1;
        h = std::min(h, std::abs(t1 - t0));
    }
    h = dir * std::min(h, opt.max_step);

    bool last = false;
    for (std::size_t step = 0; step < opt.max_steps && !last; ++step) {
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
            if (opt.allow_truncation) {
                sol.truncated = true;
                break;
            }
            throw NumericalError("integrate_ode: step size underflow at t = " + std::to_string(t));
        }
        if ((t + h - t1) * dir > 0.0) {
            h = t1 - t;
            last = true;
        }

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        f(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(t + h, y1, k7);

        State errv;
        for (std::size_t i = 0; i < N; ++i)
            errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        double err = err_norm(errv, y, y1);

        if (err <= 1.0) {
            typename OdeSolution<N>::Segment seg;
            seg.t0 = t;
            seg.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                double ydiff = y1[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                seg.r1[i] = y[i];
                seg.r2[i] = ydiff;
                seg.r3[i] = bspl;
                seg.r4[i] = ydiff - h * k7[i] - bspl;
                seg.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                 d7 * k7[i]);
            }
            sol.segments.push_back(seg);
            ++sol.accepted;
            t += h;
            y = y1;
            k1 = k7;
            if (post_step) {
                post_step(t, y);
                f(t, y, k1); // state may have been adjusted
            }
            if (stop_when && stop_when(t, y)) {
                sol.truncated = true;
                break;
            }
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            h *= std::clamp(fac, 0.2, 5.0);
            if (std::abs(h) > opt.max_step) h = dir * opt.max_step;
        } else {
            ++sol.rejected;
            last = false;
            double fac = 0.9 * std::pow(err, -0.2);
            h *= std::clamp(fac, 0.1, 1.0);
        }
        if (sol.accepted == 0 && step > 10000)
            throw NumericalError("integrate_ode: no accepted step after 10000 attempts");
    }
    sol.t_end = t;
    sol.y_end = y;
    return sol;
}

} // namespace crtwist
