#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crtwist/common.hpp"
#include "crtwist/linalg.hpp"
#include "crtwist/moduli.hpp"
#include "crtwist/ode.hpp"
#include "crtwist/quadrature.hpp"

// The twist/phase ODE system and the Wilczynski frame equation F' = F K.
// State layouts:
//   profile: (tau, tau', Re phi_1, Im phi_1, ..., Re phi_3, Im phi_3) -- 8 reals
//   frame:   (tau, tau', F as 9 re + 9 im)                            -- 20 reals
// kappa is never integrated; it is c1 / tau^2 by the first conservation law.

namespace crtwist {

// K_{kappa,tau}, the Maurer-Cartan coefficient matrix of a Wilczynski frame.
inline Mat3 structure_matrix(double kappa, double tau) {
    Mat3 k;
    const cplx i(0.0, 1.0);
    k(0, 0) = i * kappa;
    k(0, 1) = -i;
    k(0, 2) = tau;
    k(1, 1) = -2.0 * i * kappa;
    k(1, 2) = 1.0;
    k(2, 0) = 1.0;
    k(2, 2) = i * kappa;
    return k;
}

// L, the h-self-adjoint Lax matrix; F L F^{-1} is the conserved momentum.
inline Mat3 lax_matrix(double kappa, double tau, double taup) {
    Mat3 l;
    const cplx i(0.0, 1.0);
    const double b = 3.0 * (1.0 - tau * kappa);
    l(0, 1) = i * taup + b;
    l(0, 2) = 2.0 * i * tau;
    l(1, 0) = tau;
    l(1, 2) = taup + i * b;
    l(2, 0) = 3.0 * i;
    l(2, 1) = -i * tau;
    return l;
}

struct ProfileSample {
    double s = 0.0;
    double tau = 0.0;
    double taup = 0.0;
    double kappa = 0.0;
    std::array<cplx, 3> phi{};
};

struct TwistProfile {
    Modulus c;
    CurveClass curve_class;
    std::array<cplx, 3> lambda;
    double omega = 0.0;          // half-period (B'), escape time (unbounded), or 0 (c1=0 branch)
    double horizon = 0.0;        // integration endpoint actually reached
    bool truncated = false;      // stopped at the blow-up threshold
    bool c1_zero = false;
    std::vector<ProfileSample> samples; // uniform grid on [0, horizon]
    OdeSolution<8> path;

    ProfileSample eval(double s) const {
        auto y = path.eval(s);
        ProfileSample ps;
        ps.s = s;
        ps.tau = y[0];
        ps.taup = y[1];
        ps.kappa = c1_zero ? 0.0 : c.c1 / (y[0] * y[0]);
        for (int j = 0; j < 3; ++j) ps.phi[j] = cplx(y[2 + 2 * j], y[3 + 2 * j]);
        return ps;
    }
};

namespace detail {

struct ProfileRhs {
    double c1;
    std::array<cplx, 3> lambda;
    bool c1_zero;
    double guard;

    void operator()(double, const std::array<double, 8>& y, std::array<double, 8>& dy) const {
        const double tau = y[0], taup = y[1];
        const double t2 = tau * tau;
        if (!c1_zero && t2 < guard * guard)
            throw NonGeneralError("twist_profile: tau entered the zero guard band");
        dy[0] = taup;
        dy[1] = c1_zero ? t2 : t2 - 9.0 * c1 / t2 * (1.0 - c1 / tau);
        for (int j = 0; j < 3; ++j) {
            const cplx lj = lambda[j];
            cplx den = 3.0 * lj - t2;
            if (std::abs(den) < guard)
                throw NonGeneralError("twist_profile: denominator 3 lambda_j - tau^2 entered guard band");
            cplx rate;
            if (c1_zero) {
                rate = (3.0 * tau - lj * lj) / den; // c1 = 0 reduction of the phase integrand
            } else {
                cplx num = 3.0 * c1 * lj - (4.0 * c1 + lj * lj) * t2 + 3.0 * t2 * tau;
                rate = num / (t2 * den);
            }
            dy[2 + 2 * j] = rate.real();
            dy[3 + 2 * j] = rate.imag();
        }
    }
};

inline double initial_twist_value(CurveClass cls, const QuinticSpectrum& spec) {
    const auto& rr = spec.real_roots;
    switch (cls) {
        case CurveClass::A1:
        case CurveClass::A2:
        case CurveClass::A3:
            if (rr.size() != 1) throw DomainError("twist_profile: class A needs exactly one real root");
            return rr[0].value;
        case CurveClass::BPrime1:
        case CurveClass::BPrime2:
        case CurveClass::BPrime3: {
            if (rr.size() != 3) throw DomainError("twist_profile: class B' needs three real roots");
            double e1 = rr[0].value, e2 = rr[1].value;
            if (e1 < e2 && e2 < 0.0) return e2; // start at the maximum of the twist
            if (0.0 < e1) return e1;            // start at the minimum
            throw DomainError("twist_profile: lowest roots are not of one sign");
        }
        case CurveClass::BSecond1:
        case CurveClass::BSecond2:
        case CurveClass::BSecond3:
            if (rr.size() != 3) throw DomainError("twist_profile: class B'' needs three real roots");
            return rr[2].value;
        default: {
            // phase C with c1 != 0: start at the simple root above the double one
            for (const auto& r : rr)
                if (r.multiplicity == 1 && r.value > 0.0) return r.value;
            throw DomainError("twist_profile: no positive simple root for class C");
        }
    }
}

} // namespace detail

struct ProfileOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double blow_up = 1e6;          // |tau| threshold terminating unbounded classes
    int samples_per_period = 4096; // uniform resampling density
    double guard_band = 1e-8;
};

// Integrate the twist Cauchy problem for the given class, together with the
// three phases phi_j (phi_j(0) = 0). horizon <= 0 selects one full period
// 2*omega for B' classes and 0.95 * escape time for unbounded ones.
inline TwistProfile twist_profile(const Modulus& c, CurveClass cls, double horizon = 0.0,
                                  const ProfileOptions& opt = {},
                                  const Tolerances& tol = default_tolerances()) {
    if (c.c1 == 0.0)
        throw DomainError("twist_profile: c1 = 0 requires the explicit initial-data overload");

    QuinticSpectrum spec = quintic_roots(c, tol);
    MomentumSpectrum mom = momentum_eigenvalues(c, tol);

    TwistProfile prof;
    prof.c = c;
    prof.curve_class = cls;
    prof.lambda = mom.lambda;

    const bool periodic = cls == CurveClass::BPrime1 || cls == CurveClass::BPrime2 || cls == CurveClass::BPrime3;
    if (periodic) {
        prof.omega = half_period(c, spec, tol);
        if (horizon <= 0.0) horizon = 2.0 * prof.omega;
    } else {
        prof.omega = escape_time(c, detail::initial_twist_value(cls, spec), tol);
        if (horizon <= 0.0) horizon = 0.95 * prof.omega;
    }

    std::array<double, 8> y0{};
    y0[0] = detail::initial_twist_value(cls, spec);

    detail::ProfileRhs rhs{c.c1, mom.lambda, false, opt.guard_band};
    OdeOptions oopt;
    oopt.rtol = opt.rtol;
    oopt.atol = opt.atol;
    oopt.allow_truncation = !periodic;
    std::function<bool(double, const std::array<double, 8>&)> stop;
    if (!periodic)
        stop = [&opt](double, const std::array<double, 8>& y) { return std::abs(y[0]) > opt.blow_up; };

    prof.path = integrate_ode<8>(rhs, 0.0, y0, horizon, oopt, stop);
    prof.truncated = prof.path.truncated;
    prof.horizon = prof.path.t_end;

    const double period = periodic ? 2.0 * prof.omega : prof.horizon;
    int nsamp = std::max(16, static_cast<int>(std::ceil(opt.samples_per_period * prof.horizon / period)));
    prof.samples.reserve(nsamp + 1);
    for (int k = 0; k <= nsamp; ++k)
        prof.samples.push_back(prof.eval(prof.horizon * k / nsamp));
    return prof;
}

// c1 = 0 branch: kappa = 0 identically and tau'' = tau^2, with caller-chosen
// initial data.
inline TwistProfile twist_profile_c1zero(double c2, double tau0, double taup0, double horizon,
                                         const ProfileOptions& opt = {},
                                         const Tolerances& tol = default_tolerances()) {
    Modulus c{0.0, c2};
    MomentumSpectrum mom = momentum_eigenvalues(c, tol);
    TwistProfile prof;
    prof.c = c;
    prof.curve_class = CurveClass::C1;
    prof.lambda = mom.lambda;
    prof.c1_zero = true;

    std::array<double, 8> y0{};
    y0[0] = tau0;
    y0[1] = taup0;
    detail::ProfileRhs rhs{0.0, mom.lambda, true, opt.guard_band};
    OdeOptions oopt;
    oopt.rtol = opt.rtol;
    oopt.atol = opt.atol;
    oopt.allow_truncation = true;
    auto stop = [&opt](double, const std::array<double, 8>& y) { return std::abs(y[0]) > opt.blow_up; };
    prof.path = integrate_ode<8>(rhs, 0.0, y0, horizon, oopt, stop);
    prof.truncated = prof.path.truncated;
    prof.horizon = prof.path.t_end;
    int nsamp = std::max(16, opt.samples_per_period);
    for (int k = 0; k <= nsamp; ++k)
        prof.samples.push_back(prof.eval(prof.horizon * k / nsamp));
    return prof;
}

struct FramePath {
    std::vector<double> s;
    std::vector<Mat3> frames;
    double horizon = 0.0;
    double max_group_residual = 0.0; // measured before each correction
    double max_correction = 0.0;
    OdeSolution<20> path;

    Mat3 eval(double at) const {
        auto y = path.eval(at);
        Mat3 f;
        for (int k = 0; k < 9; ++k) f.a[k] = cplx(y[2 + k], y[11 + k]);
        return f;
    }
};

struct FrameOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    int reproject_every = 100; // accepted steps between group corrections
    double group_tol = 1e-6;   // residual bound before correction
    int samples = 4096;
};

// Solve F' = F K_{kappa,tau} along the profile's twist, re-deriving
// (tau, tau') from the same Cauchy problem so the coefficients carry no
// interpolation error.
inline FramePath integrate_frame(const TwistProfile& prof, const Mat3& f0,
                                 const FrameOptions& opt = {}) {
    if (group_residual(f0) > opt.group_tol)
        throw DomainError("integrate_frame: F0 is not in G (group residual above tolerance)");

    const double c1 = prof.c1_zero ? 0.0 : prof.c.c1;
    const bool c1_zero = prof.c1_zero;

    auto rhs = [c1, c1_zero](double, const std::array<double, 20>& y, std::array<double, 20>& dy) {
        const double tau = y[0], taup = y[1];
        const double t2 = tau * tau;
        dy[0] = taup;
        dy[1] = c1_zero ? t2 : t2 - 9.0 * c1 / t2 * (1.0 - c1 / tau);
        const double kappa = c1_zero ? 0.0 : c1 / t2;
        Mat3 f;
        for (int k = 0; k < 9; ++k) f.a[k] = cplx(y[2 + k], y[11 + k]);
        Mat3 df = f * structure_matrix(kappa, tau);
        for (int k = 0; k < 9; ++k) {
            dy[2 + k] = df.a[k].real();
            dy[11 + k] = df.a[k].imag();
        }
    };

    std::array<double, 20> y0{};
    const ProfileSample p0 = prof.eval(0.0);
    y0[0] = p0.tau;
    y0[1] = p0.taup;
    for (int k = 0; k < 9; ++k) {
        y0[2 + k] = f0.a[k].real();
        y0[11 + k] = f0.a[k].imag();
    }

    FramePath fp;
    int counter = 0;
    auto post = [&](double, std::array<double, 20>& y) {
        if (opt.reproject_every <= 0 || ++counter % opt.reproject_every != 0) return;
        Mat3 f;
        for (int k = 0; k < 9; ++k) f.a[k] = cplx(y[2 + k], y[11 + k]);
        double res = group_residual(f);
        fp.max_group_residual = std::max(fp.max_group_residual, res);
        if (res > opt.group_tol)
            throw AccuracyError("integrate_frame: group residual " + std::to_string(res) +
                                " exceeded tolerance before correction");
        double corr = project_to_group(f);
        fp.max_correction = std::max(fp.max_correction, corr);
        for (int k = 0; k < 9; ++k) {
            y[2 + k] = f.a[k].real();
            y[11 + k] = f.a[k].imag();
        }
    };

    OdeOptions oopt;
    oopt.rtol = opt.rtol;
    oopt.atol = opt.atol;
    fp.path = integrate_ode<20>(rhs, 0.0, y0, prof.horizon, oopt, nullptr, post);
    fp.horizon = prof.horizon;

    // final residual check (also covers runs shorter than one reprojection)
    {
        Mat3 f;
        for (int k = 0; k < 9; ++k) f.a[k] = cplx(fp.path.y_end[2 + k], fp.path.y_end[11 + k]);
        double res = group_residual(f);
        fp.max_group_residual = std::max(fp.max_group_residual, res);
        if (res > opt.group_tol)
            throw AccuracyError("integrate_frame: final group residual exceeds tolerance");
    }

    fp.s.reserve(opt.samples + 1);
    fp.frames.reserve(opt.samples + 1);
    for (int k = 0; k <= opt.samples; ++k) {
        double s = prof.horizon * k / opt.samples;
        fp.s.push_back(s);
        fp.frames.push_back(fp.eval(s));
    }
    return fp;
}

struct Monodromy {
    Mat3 matrix;
    std::array<cplx, 3> eigenvalues;
    std::array<double, 3> phases; // arg(eigenvalue), in (-pi, pi]
};

// M = F(2 n omega) F(0)^{-1}; eigenvalue phases / 2pi equal the quantum
// integrals P_j mod 1 for closed-type profiles.
inline Monodromy monodromy(const FramePath& fp, double omega, int n = 1,
                           const Tolerances& tol = default_tolerances()) {
    const double send = 2.0 * n * omega;
    if (send > fp.horizon * (1.0 + 1e-12))
        throw DomainError("monodromy: frame path horizon is shorter than 2 n omega");
    Mat3 m = fp.eval(send) * inverse(fp.eval(0.0));

    Monodromy out;
    out.matrix = m;
    auto cp = char_poly(m); // x^3 + c2 x^2 + c1 x + c0
    std::vector<cplx> coeffs = {cp[0], cp[1], cp[2], 1.0};
    auto ev = aberth_roots(coeffs);
    for (int k = 0; k < 3; ++k) {
        if (std::abs(std::abs(ev[k]) - 1.0) > 1e3 * tol.group_tol)
            throw AccuracyError("monodromy: eigenvalue modulus deviates from 1 beyond tolerance");
        out.eigenvalues[k] = ev[k];
        out.phases[k] = std::arg(ev[k]);
    }
    std::sort(out.phases.begin(), out.phases.end());
    return out;
}

} // namespace crtwist
