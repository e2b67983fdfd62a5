#pragma once

#include <array>
#include <algorithm>
#include <cmath>

#include "crtwist/common.hpp"

// Fixed-size complex 3-vectors and 3x3 matrices, plus the indefinite
// Hermitian form of signature (2,1) and the pseudo-unitary group machinery
// built on it. Everything is a value type; no allocation.

namespace crtwist {

using Vec3 = std::array<cplx, 3>;

struct Mat3 {
    std::array<cplx, 9> a{};

    cplx& operator()(int i, int j) { return a[3 * i + j]; }
    const cplx& operator()(int i, int j) const { return a[3 * i + j]; }

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }

    static Mat3 diagonal(cplx d0, cplx d1, cplx d2) {
        Mat3 m;
        m(0, 0) = d0;
        m(1, 1) = d1;
        m(2, 2) = d2;
        return m;
    }

    static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 m;
        for (int i = 0; i < 3; ++i) {
            m(i, 0) = c0[i];
            m(i, 1) = c1[i];
            m(i, 2) = c2[i];
        }
        return m;
    }

    Vec3 column(int j) const { return {(*this)(0, j), (*this)(1, j), (*this)(2, j)}; }
};

inline Mat3 operator+(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

inline Mat3 operator-(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

inline Mat3 operator*(cplx s, const Mat3& x) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = s * x.a[i];
    return r;
}

inline Mat3 operator*(const Mat3& x, cplx s) { return s * x; }

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

inline Vec3 operator*(const Mat3& x, const Vec3& v) {
    Vec3 r{};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) r[i] += x(i, k) * v[k];
    return r;
}

inline Vec3 operator*(cplx s, const Vec3& v) { return {s * v[0], s * v[1], s * v[2]}; }

inline Vec3 operator-(const Vec3& x, const Vec3& y) {
    return {x[0] - y[0], x[1] - y[1], x[2] - y[2]};
}

inline Mat3 conj_transpose(const Mat3& x) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = std::conj(x(j, i));
    return r;
}

inline cplx trace(const Mat3& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

inline cplx det(const Mat3& x) {
    return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
           x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
           x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

inline Mat3 adjugate(const Mat3& x) {
    Mat3 r;
    r(0, 0) = x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1);
    r(0, 1) = x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2);
    r(0, 2) = x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1);
    r(1, 0) = x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2);
    r(1, 1) = x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0);
    r(1, 2) = x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2);
    r(2, 0) = x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0);
    r(2, 1) = x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1);
    r(2, 2) = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
    return r;
}

inline Mat3 inverse(const Mat3& x) {
    cplx d = det(x);
    if (std::abs(d) == 0.0) throw NumericalError("inverse: singular 3x3 matrix");
    return (1.0 / d) * adjugate(x);
}

inline double frobenius(const Mat3& x) {
    double s = 0.0;
    for (const cplx& v : x.a) s += std::norm(v);
    return std::sqrt(s);
}

inline double norm2(const Vec3& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

inline Mat3 commutator(const Mat3& x, const Mat3& y) { return x * y - y * x; }

// Hermitian form matrix h of signature (2,1).
inline const Mat3& hermitian_h() {
    static const Mat3 h = [] {
        Mat3 m;
        m(0, 2) = cplx(0.0, 1.0);
        m(1, 1) = 1.0;
        m(2, 0) = cplx(0.0, -1.0);
        return m;
    }();
    return h;
}

// <z,w> = conj(z)^T h w = i(conj(z1) w3 - conj(z3) w1) + conj(z2) w2
inline cplx form(const Vec3& z, const Vec3& w) {
    const cplx i(0.0, 1.0);
    return i * (std::conj(z[0]) * w[2] - std::conj(z[2]) * w[0]) + std::conj(z[1]) * w[1];
}

// Residual of membership in G = { A in SL(3,C) : A^* h A = h }.
inline double group_residual(const Mat3& f) {
    const Mat3& h = hermitian_h();
    double gram = frobenius(conj_transpose(f) * h * f - h);
    double uni = std::abs(det(f) - 1.0);
    return std::max(gram, uni);
}

// Residual of h-self-adjointness, X^* h = h X (membership in i*su(2,1)).
inline double selfadjoint_residual(const Mat3& x) {
    const Mat3& h = hermitian_h();
    return frobenius(conj_transpose(x) * h - h * x);
}

// Nearest-G correction for a matrix that has drifted slightly off the group:
// Newton iteration for E^{-1/2} with E = h^{-1} F^* h F, then unit-determinant
// normalization by the principal cube root. Returns the correction magnitude.
inline double project_to_group(Mat3& f) {
    const Mat3& h = hermitian_h();
    const Mat3 hinv = inverse(h);
    Mat3 e = hinv * conj_transpose(f) * h * f;
    Mat3 x = Mat3::identity();
    for (int it = 0; it < 4; ++it) {
        // X <- X (3 I - E X^2) / 2 converges to E^{-1/2} for E near I
        x = 0.5 * (x * (3.0 * Mat3::identity() - e * (x * x)));
    }
    Mat3 g = f * x;
    cplx d = det(g);
    double arg = std::arg(d) / 3.0;
    double mag = std::cbrt(std::abs(d));
    cplx root = std::polar(mag, arg);
    g = (1.0 / root) * g;
    double corr = frobenius(g - f);
    f = g;
    return corr;
}

// Coefficients (c0, c1, c2) of det(x I - M) = x^3 + c2 x^2 + c1 x + c0.
inline std::array<cplx, 3> char_poly(const Mat3& m) {
    cplx t = trace(m);
    cplx t2 = trace(m * m);
    cplx d = det(m);
    cplx c2 = -t;
    cplx c1 = 0.5 * (t * t - t2);
    cplx c0 = -d;
    return {c0, c1, c2};
}

} // namespace crtwist
