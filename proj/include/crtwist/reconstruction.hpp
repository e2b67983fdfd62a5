#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crtwist/common.hpp"
#include "crtwist/dynamics.hpp"
#include "crtwist/linalg.hpp"
#include "crtwist/moduli.hpp"

// Closed-form reconstruction of critical curves: eigen-sections y_j of the
// Lax matrix, the general congruence formula, and the standard configuration
// for general type-B'1 curves (momentum in torus-normal form).

namespace crtwist {

struct EigenSections {
    std::array<cplx, 3> lambda;
    std::vector<double> s;
    std::vector<Mat3> v;                    // columns y_1, y_2, y_3
    std::vector<std::array<cplx, 3>> r;     // continuous determinations of sqrt(tau^2 - 3 lambda_j)
    std::vector<cplx> det_v;
    double min_abs_det = 0.0;
};

inline Vec3 eigen_section(double c1, double tau, double taup, cplx lambda) {
    const cplx i(0.0, 1.0);
    return {tau * (3.0 - i * taup) - lambda * lambda - 3.0 * c1,
            9.0 - 9.0 * c1 / tau - lambda * tau - 3.0 * i * taup,
            i * (tau * tau - 3.0 * lambda)};
}

// Evaluate y_j, V = (y_1 y_2 y_3), and the square-root branches r_j on the
// profile grid. Branch continuity is enforced by sign continuation from s=0.
inline EigenSections eigen_sections(const TwistProfile& prof, const MomentumSpectrum& mom,
                                    const Tolerances& tol = default_tolerances()) {
    EigenSections es;
    es.lambda = mom.lambda;
    const double c1 = prof.c1_zero ? 0.0 : prof.c.c1;

    const size_t n = prof.samples.size();
    es.s.reserve(n);
    es.v.reserve(n);
    es.r.reserve(n);
    es.det_v.reserve(n);

    std::array<cplx, 3> prev{};
    double scale = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const ProfileSample& ps = prof.samples[k];
        Mat3 v = Mat3::from_columns(eigen_section(c1, ps.tau, ps.taup, mom.lambda[0]),
                                    eigen_section(c1, ps.tau, ps.taup, mom.lambda[1]),
                                    eigen_section(c1, ps.tau, ps.taup, mom.lambda[2]));
        cplx d = det(v);
        std::array<cplx, 3> r;
        for (int j = 0; j < 3; ++j) {
            cplx w = std::sqrt(cplx(ps.tau * ps.tau, 0.0) - 3.0 * mom.lambda[j]);
            if (k > 0 && std::abs(-w - prev[j]) < std::abs(w - prev[j])) w = -w;
            r[j] = w;
        }
        prev = r;
        es.s.push_back(ps.s);
        es.v.push_back(v);
        es.det_v.push_back(d);
        es.r.push_back(r);
        scale = std::max(scale, frobenius(v));
        if (k == 0)
            es.min_abs_det = std::abs(d);
        else
            es.min_abs_det = std::min(es.min_abs_det, std::abs(d));
    }
    if (es.min_abs_det < tol.guard_band * scale * scale * scale)
        throw NonGeneralError("eigen_sections: det V below tolerance (non-general modulus)");
    return es;
}

struct ProjectiveSample {
    double s;
    Vec3 z; // homogeneous coordinates, <z,z> = 0
};

// Theorem-B congruence formula: with F(0) = I_3 normalization the curve is
// s -> [ M D(r_j e^{i phi_j}) V^{-1} e_1 ],  M = V(0) D(r_j(0))^{-1}.
inline std::vector<ProjectiveSample> reconstruct_general(const TwistProfile& prof,
                                                         const EigenSections& es) {
    if (es.s.size() != prof.samples.size())
        throw DomainError("reconstruct_general: sections grid does not match the profile grid");
    Mat3 m = es.v[0] * Mat3::diagonal(1.0 / es.r[0][0], 1.0 / es.r[0][1], 1.0 / es.r[0][2]);
    const cplx i(0.0, 1.0);

    std::vector<ProjectiveSample> out;
    out.reserve(es.s.size());
    for (size_t k = 0; k < es.s.size(); ++k) {
        const auto& phi = prof.samples[k].phi;
        Mat3 d = Mat3::diagonal(es.r[k][0] * std::exp(i * phi[0]), es.r[k][1] * std::exp(i * phi[1]),
                                es.r[k][2] * std::exp(i * phi[2]));
        // V^{-1} e_1 is the first column of the inverse
        Mat3 vinv = inverse(es.v[k]);
        Vec3 col{vinv(0, 0), vinv(1, 0), vinv(2, 0)};
        out.push_back({es.s[k], m * (d * col)});
    }
    return out;
}

// Canonical torus-normal momentum with eigenvalues (lambda1, lambda2, lambda3).
inline Mat3 canonical_momentum(double l1, double l2, double l3, int eps) {
    Mat3 m;
    const cplx i(0.0, 1.0);
    m(0, 0) = 0.5 * (l2 + l3);
    m(2, 2) = 0.5 * (l2 + l3);
    m(1, 1) = l1;
    m(0, 2) = 0.5 * static_cast<double>(eps) * i * (l2 - l3);
    m(2, 0) = -0.5 * static_cast<double>(eps) * i * (l2 - l3);
    return m;
}

// Constant unimodular pseudo-unitary basis used by the normal form.
inline Mat3 standard_basis() {
    Mat3 b;
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    b(0, 0) = s;
    b(0, 1) = -s;
    b(1, 2) = i;
    b(2, 0) = i * s;
    b(2, 1) = i * s;
    return b;
}

enum class Polarization { Positive, Negative };

struct StandardConfiguration {
    Modulus c;
    std::array<cplx, 3> lambda;
    double omega = 0.0;
    int eps = +1; // -sign(e2^2 - 3 lambda3)
    Polarization polarization = Polarization::Negative;
    std::array<double, 3> rho{};
    std::vector<double> s;
    std::vector<std::array<cplx, 3>> z;  // z_1, z_2, z_3
    std::vector<ProjectiveSample> points;
    TwistProfile profile;
};

// Standard configuration of a general type-B'1 curve (Theorem-C normal form):
// gamma(s) = [ (z2+z3, eps i z1, -eps i (z2-z3)) ].
inline StandardConfiguration standard_configuration(const Modulus& c, double horizon = 0.0,
                                                    const ProfileOptions& popt = {},
                                                    const Tolerances& tol = default_tolerances()) {
    QuinticSpectrum spec = quintic_roots(c, tol);
    MomentumSpectrum mom = momentum_eigenvalues(c, tol);
    if (mom.kind != OrbitType::OT1)
        throw DomainError("standard_configuration: modulus is not of orbit type 1");
    GeneralityCheck gen = is_general(c, tol);
    if (!gen.general)
        throw NonGeneralError("standard_configuration: Delta1*Delta2 = 0 within tolerance");
    if (spec.real_roots.size() != 3 || !(spec.real_roots[0].value < spec.real_roots[1].value) ||
        !(spec.real_roots[1].value < 0.0))
        throw DomainError("standard_configuration: modulus is not of type B1 (lowest roots negative)");

    const double l1 = mom.lambda[0].real(), l2 = mom.lambda[1].real(), l3 = mom.lambda[2].real();
    const double e2 = spec.real_roots[1].value;

    StandardConfiguration sc;
    sc.c = c;
    sc.lambda = mom.lambda;
    const double pol_ind = e2 * e2 - 3.0 * l3;
    if (std::abs(pol_ind) < tol.guard_band)
        throw DegeneracyError("standard_configuration: polarization sign within tolerance of zero");
    sc.eps = pol_ind > 0.0 ? -1 : +1;
    sc.polarization = pol_ind > 0.0 ? Polarization::Positive : Polarization::Negative;
    sc.rho = {1.0 / std::sqrt((2.0 * l2 + l3) * (l2 + 2.0 * l3)),
              1.0 / std::sqrt(2.0 * (l3 - l2) * (2.0 * l2 + l3)),
              1.0 / std::sqrt(2.0 * (l3 - l2) * (l2 + 2.0 * l3))};

    sc.profile = twist_profile(c, CurveClass::BPrime1, horizon, popt, tol);
    sc.omega = sc.profile.omega;

    const cplx i(0.0, 1.0);
    const size_t n = sc.profile.samples.size();
    sc.s.reserve(n);
    sc.z.reserve(n);
    sc.points.reserve(n);
    std::array<cplx, 3> prev_amp{};
    for (size_t k = 0; k < n; ++k) {
        const ProfileSample& ps = sc.profile.samples[k];
        const double t2 = ps.tau * ps.tau;
        // continuous determinations of the amplitude square roots
        std::array<cplx, 3> amp = {std::sqrt(cplx(3.0 * (l2 + l3) + t2, 0.0)),
                                   std::sqrt(cplx(3.0 * l2 - t2, 0.0)),
                                   std::sqrt(cplx(3.0 * l3 - t2, 0.0))};
        if (k > 0)
            for (int j = 0; j < 3; ++j)
                if (std::abs(-amp[j] - prev_amp[j]) < std::abs(amp[j] - prev_amp[j])) amp[j] = -amp[j];
        prev_amp = amp;

        std::array<cplx, 3> z;
        for (int j = 0; j < 3; ++j) z[j] = sc.rho[j] * amp[j] * std::exp(i * ps.phi[j]);
        Vec3 w{z[1] + z[2], static_cast<double>(sc.eps) * i * z[0],
               -static_cast<double>(sc.eps) * i * (z[1] - z[2])};
        sc.s.push_back(ps.s);
        sc.z.push_back(z);
        sc.points.push_back({ps.s, w});
    }
    return sc;
}

// Change of frame that moves an integrated curve with momentum `m` into
// standard position (the unique A in G with eps^{-1} A B~ = B; returned as
// the left-acting congruence B A^{-1}).
//
// The eigenvector basis is normalized to a unimodular pseudo-unitary basis:
// columns ordered so the first is the timelike direction, phases fixed by
// first-nonzero-component-real-positive, overall phase by the principal
// cube root of the determinant.
inline Mat3 standardize_transform(const Mat3& momentum, const MomentumSpectrum& mom,
                                  Polarization pol, const Tolerances& tol = default_tolerances()) {
    if (mom.kind != OrbitType::OT1)
        throw DomainError("standardize_transform: momentum is not of orbit type 1");
    const double l1 = mom.lambda[0].real(), l2 = mom.lambda[1].real(), l3 = mom.lambda[2].real();

    auto eigvec = [&](double lambda) {
        Mat3 b = momentum - Mat3::diagonal(lambda, lambda, lambda);
        Mat3 adj = adjugate(b);
        int best = 0;
        double bestn = 0.0;
        for (int j = 0; j < 3; ++j) {
            double nj = norm2(adj.column(j));
            if (nj > bestn) {
                bestn = nj;
                best = j;
            }
        }
        if (bestn < tol.guard_band)
            throw NumericalError("standardize_transform: eigenvector extraction failed (defective momentum)");
        Vec3 v = adj.column(best);
        // deterministic phase: first component of magnitude > 1e-12 made real positive
        for (int j = 0; j < 3; ++j)
            if (std::abs(v[j]) > 1e-12 * bestn) {
                v = (std::abs(v[j]) / v[j]) * v;
                break;
            }
        return v;
    };

    // column order (timelike first): negative polarization has timelike
    // lambda3-eigenspace, positive has timelike lambda2-eigenspace
    std::array<double, 3> order = pol == Polarization::Negative
                                      ? std::array<double, 3>{l3, l2, l1}
                                      : std::array<double, 3>{l2, l3, l1};
    std::array<Vec3, 3> cols;
    for (int j = 0; j < 3; ++j) {
        Vec3 v = eigvec(order[j]);
        cplx q = form(v, v);
        double mag = std::abs(q.real());
        if (mag < tol.guard_band)
            throw DegeneracyError("standardize_transform: eigenvector is null (degenerate polarization)");
        if (j == 0 && q.real() > 0.0)
            throw DomainError("standardize_transform: first column is not timelike; polarization mismatch");
        if (j > 0 && q.real() < 0.0)
            throw DomainError("standardize_transform: spacelike eigenvector expected");
        cols[j] = (1.0 / std::sqrt(mag)) * v;
    }
    Mat3 a = Mat3::from_columns(cols[0], cols[1], cols[2]);
    // unit determinant via the cube root with argument in (-pi/3, pi/3]
    cplx d = det(a);
    double arg = std::arg(d);
    cplx root = std::polar(std::cbrt(std::abs(d)), arg / 3.0);
    a = (1.0 / root) * a;
    return standard_basis() * inverse(a);
}

} // namespace crtwist
