#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "crtwist/common.hpp"
#include "crtwist/dynamics.hpp"
#include "crtwist/linalg.hpp"
#include "crtwist/reconstruction.hpp"

// Heisenberg projection/chart, the dual curve, and projective-geometry
// helpers for sampled curves on the null quadric.

namespace crtwist {

// pi_H([z]) = (Re(z2/z1), Im(z2/z1), Re(z3/z1)); the pole [e3] is excluded.
inline std::array<double, 3> heisenberg_project(const Vec3& z) {
    double n = norm2(z);
    if (std::abs(z[0]) < 1e-10 * n)
        throw PoleError("heisenberg_project: point at the pole [e3] (|z1| below threshold)");
    cplx w2 = z[1] / z[0], w3 = z[2] / z[0];
    return {w2.real(), w2.imag(), w3.real()};
}

// j_H(x,y,z) = [ (1, x+iy, z + i(x^2+y^2)/2) ]; lands on the null quadric
// identically.
inline Vec3 heisenberg_chart(double x, double y, double z) {
    return {cplx(1.0, 0.0), cplx(x, y), cplx(z, 0.5 * (x * x + y * y))};
}

// Residual of membership in the null quadric, relative to |z|^2.
inline double null_residual(const Vec3& z) {
    double n2 = std::norm(z[0]) + std::norm(z[1]) + std::norm(z[2]);
    return std::abs(form(z, z)) / n2;
}

// Chordal projective distance: 0 for equal lines, sqrt(2) for orthogonal.
inline double projective_distance(const Vec3& a, const Vec3& b) {
    double na = norm2(a), nb = norm2(b);
    cplx ip = (std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2]) / (na * nb);
    double c = std::min(1.0, std::abs(ip));
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * c));
}

// Distance in the affine chart dividing by the largest-modulus coordinate
// of a; matches the criterion "affine-chart distance" for closure checks.
inline double affine_chart_distance(const Vec3& a, const Vec3& b) {
    int pivot = 0;
    for (int j = 1; j < 3; ++j)
        if (std::abs(a[j]) > std::abs(a[pivot])) pivot = j;
    if (std::abs(b[pivot]) == 0.0) return std::numeric_limits<double>::infinity();
    double d2 = 0.0;
    for (int j = 0; j < 3; ++j) {
        if (j == pivot) continue;
        d2 += std::norm(a[j] / a[pivot] - b[j] / b[pivot]);
    }
    return std::sqrt(d2);
}

// Unit Euclidean norm with the first component of magnitude > 1e-12 made
// real positive; gives deterministic homogeneous representatives for export.
inline Vec3 normalize_representative(Vec3 z) {
    double n = norm2(z);
    if (n == 0.0) throw DomainError("normalize_representative: zero vector");
    z = (1.0 / n) * z;
    for (int j = 0; j < 3; ++j)
        if (std::abs(z[j]) > 1e-12) {
            z = (std::abs(z[j]) / z[j]) * z;
            break;
        }
    return z;
}

struct DualSample {
    double s;
    Vec3 z;            // [F_3(s)]
    double tangency;   // -i<F3, F3'> along the frame; zero iff the dual is Legendrian there
};

// Dual curve [F_3(s)] of a Wilczynski frame path, with the transversality
// diagnostic evaluated from F' = F K.
inline std::vector<DualSample> dual_curve(const FramePath& fp, const TwistProfile& prof) {
    std::vector<DualSample> out;
    out.reserve(fp.s.size());
    const cplx i(0.0, 1.0);
    for (size_t k = 0; k < fp.s.size(); ++k) {
        const Mat3& f = fp.frames[k];
        ProfileSample ps = prof.eval(fp.s[k]);
        Mat3 df = f * structure_matrix(ps.kappa, ps.tau);
        Vec3 f3 = f.column(2);
        Vec3 df3 = df.column(2);
        cplx diag = -i * form(f3, df3);
        out.push_back({fp.s[k], f3, diag.real()});
    }
    return out;
}

} // namespace crtwist
