#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "crtwist/common.hpp"
#include "crtwist/polynomial.hpp"

// Polynomial algebra over a modulus c = (c1, c2): the quintic P_c and the
// cubic Q_c, their spectra, phase/orbit/region classification, the
// separatrix curve, and the two discriminants governing generality.

namespace crtwist {

struct Modulus {
    double c1 = 0.0;
    double c2 = 0.0;
};

// P_c(x) = x^5 + (3/2) c2 x^2 + 27 c1 x - (27/2) c1^2
inline Poly quintic_poly(const Modulus& c) {
    return Poly{{-13.5 * c.c1 * c.c1, 27.0 * c.c1, 1.5 * c.c2, 0.0, 0.0, 1.0}};
}

// Q_c(x) = x^3 + 6 c1 x + (27 + 3 c2); minus the characteristic polynomial
// of the momentum.
inline Poly momentum_poly(const Modulus& c) {
    return Poly{{27.0 + 3.0 * c.c2, 6.0 * c.c1, 0.0, 1.0}};
}

inline double discriminant1(const Modulus& c) {
    return -27.0 * (32.0 * c.c1 * c.c1 * c.c1 + 9.0 * sq(9.0 + c.c2));
}

inline double discriminant2(const Modulus& c) {
    const double c13 = c.c1 * c.c1 * c.c1;
    return 9.0 * c13 * (c13 + 216.0) + 6.0 * c13 * c.c2 * (c.c2 + 36.0) +
           (c.c2 + 9.0) * (c.c2 + 18.0) * (c.c2 + 18.0) * (c.c2 + 18.0);
}

// Magnitudes of the monomial contributions, used to scale zero tests.
inline double discriminant1_scale(const Modulus& c) {
    return 27.0 * (32.0 * std::abs(c.c1 * c.c1 * c.c1) + 9.0 * sq(9.0 + std::abs(c.c2))) + 1.0;
}

inline double discriminant2_scale(const Modulus& c) {
    const double a13 = std::abs(c.c1 * c.c1 * c.c1);
    return 9.0 * a13 * (a13 + 216.0) + 6.0 * a13 * std::abs(c.c2) * (std::abs(c.c2) + 36.0) +
           (std::abs(c.c2) + 9.0) * std::pow(std::abs(c.c2) + 18.0, 3) + 1.0;
}

struct RealRoot {
    double value;
    int multiplicity;
};

struct ComplexPair {
    double re;
    double im; // > 0; the pair is re +- i*im
    int multiplicity;
};

struct QuinticSpectrum {
    std::vector<RealRoot> real_roots;     // sorted ascending
    std::vector<ComplexPair> complex_pairs;

    int real_count_with_multiplicity() const {
        int n = 0;
        for (const auto& r : real_roots) n += r.multiplicity;
        return n;
    }
    bool has_multiple_real_root() const {
        for (const auto& r : real_roots)
            if (r.multiplicity > 1) return true;
        return false;
    }
    int simple_real_count() const {
        int n = 0;
        for (const auto& r : real_roots)
            if (r.multiplicity == 1) ++n;
        return n;
    }
};

enum class OrbitType { OT1, OT2, OT3 };

struct MomentumSpectrum {
    OrbitType kind;
    // OT1: lambda1 = -(lambda2+lambda3) < 0 < lambda2 < lambda3 (all real).
    // OT2: lambda1 real, lambda2 with positive imaginary part, lambda3 = conj(lambda2).
    // OT3: multiple eigenvalue; sorted by real part.
    std::array<cplx, 3> lambda;
};

enum class Phase { A, B, C };

enum class Region {
    MPrimePlus,     // phase B, c1 < 0
    MSecondPlus,    // phase B, c1 > 0, c2 > 0
    MThirdPlus,     // phase B, c1 > 0, c2 < 0
    MPrimeMinus,    // phase A, c1 < 0
    MSecondMinus,   // phase A, c1 > 0
    Xi,             // on the separatrix
    Oy,             // c1 = 0
    Boundary,       // within the tolerance band of a region boundary
};

enum class CurveClass { A1, A2, A3, BPrime1, BPrime2, BPrime3, BSecond1, BSecond2, BSecond3, C1, C2, C3 };

struct Classification {
    Phase phase;
    OrbitType orbit;
    Region region;
    std::vector<CurveClass> curve_classes;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double separatrix_distance = 0.0;
};

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::A: return "A";
        case Phase::B: return "B";
        default: return "C";
    }
}

inline const char* to_string(OrbitType t) {
    switch (t) {
        case OrbitType::OT1: return "OT1";
        case OrbitType::OT2: return "OT2";
        default: return "OT3";
    }
}

inline const char* to_string(Region r) {
    switch (r) {
        case Region::MPrimePlus: return "M'+";
        case Region::MSecondPlus: return "M''+";
        case Region::MThirdPlus: return "M'''+";
        case Region::MPrimeMinus: return "M'-";
        case Region::MSecondMinus: return "M''-";
        case Region::Xi: return "Xi";
        case Region::Oy: return "Oy";
        default: return "boundary";
    }
}

inline const char* to_string(CurveClass c) {
    switch (c) {
        case CurveClass::A1: return "A1";
        case CurveClass::A2: return "A2";
        case CurveClass::A3: return "A3";
        case CurveClass::BPrime1: return "B'1";
        case CurveClass::BPrime2: return "B'2";
        case CurveClass::BPrime3: return "B'3";
        case CurveClass::BSecond1: return "B''1";
        case CurveClass::BSecond2: return "B''2";
        case CurveClass::BSecond3: return "B''3";
        case CurveClass::C1: return "C1";
        case CurveClass::C2: return "C2";
        default: return "C3";
    }
}

// Roots of P_c with multiplicity clustering; real roots sorted ascending.
inline QuinticSpectrum quintic_roots(const Modulus& c, const Tolerances& tol = default_tolerances()) {
    Poly p = quintic_poly(c);
    std::vector<cplx> raw = aberth_roots(p);
    // pair up conjugates before clustering by symmetrizing: roots of a real
    // polynomial come in conjugate pairs up to iteration noise
    auto clusters = cluster_roots(raw, tol.root_cluster);

    const double scale = p.coefficient_scale();
    QuinticSpectrum spec;
    for (const auto& cl : clusters) {
        if (std::abs(cl.value.imag()) < tol.root_cluster * (1.0 + std::abs(cl.value.real()))) {
            double r = cl.value.real();
            double residual = std::abs(p(r));
            if (residual > tol.root_residual * scale)
                throw NumericalError("quintic_roots: root residual " + std::to_string(residual) +
                                     " exceeds tolerance");
            spec.real_roots.push_back({r, cl.multiplicity});
        } else if (cl.value.imag() > 0.0) {
            spec.complex_pairs.push_back({cl.value.real(), cl.value.imag(), cl.multiplicity});
        }
    }
    std::sort(spec.real_roots.begin(), spec.real_roots.end(),
              [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
    std::sort(spec.complex_pairs.begin(), spec.complex_pairs.end(),
              [](const ComplexPair& a, const ComplexPair& b) { return a.im < b.im; });

    int total = spec.real_count_with_multiplicity();
    for (const auto& q : spec.complex_pairs) total += 2 * q.multiplicity;
    if (total != 5)
        throw NumericalError("quintic_roots: clustered multiplicities sum to " + std::to_string(total));
    return spec;
}

// Eigenvalues of the momentum = roots of Q_c, ordered by orbit-type convention.
inline MomentumSpectrum momentum_eigenvalues(const Modulus& c, const Tolerances& tol = default_tolerances()) {
    const double d1 = discriminant1(c);
    const double band = tol.boundary_band * discriminant1_scale(c);

    Poly q = momentum_poly(c);
    std::vector<cplx> raw = aberth_roots(q);

    MomentumSpectrum spec;
    if (d1 > band) {
        spec.kind = OrbitType::OT1;
        std::array<double, 3> re{raw[0].real(), raw[1].real(), raw[2].real()};
        std::sort(re.begin(), re.end());
        // ordering contract: lambda1 = -(lambda2+lambda3) exactly as stored
        spec.lambda = {cplx(-(re[1] + re[2]), 0.0), cplx(re[1], 0.0), cplx(re[2], 0.0)};
    } else if (d1 < -band) {
        spec.kind = OrbitType::OT2;
        int ireal = 0;
        for (int k = 1; k < 3; ++k)
            if (std::abs(raw[k].imag()) < std::abs(raw[ireal].imag())) ireal = k;
        cplx rest[2];
        int j = 0;
        for (int k = 0; k < 3; ++k)
            if (k != ireal) rest[j++] = raw[k];
        cplx up = (rest[0].imag() > 0.0) ? rest[0] : rest[1];
        spec.lambda = {cplx(raw[ireal].real(), 0.0), up, std::conj(up)};
    } else {
        spec.kind = OrbitType::OT3;
        auto clusters = cluster_roots(raw, tol.root_cluster);
        std::vector<cplx> vals;
        for (const auto& cl : clusters)
            for (int k = 0; k < cl.multiplicity; ++k)
                vals.push_back(std::abs(cl.value.imag()) < tol.root_cluster * (1.0 + std::abs(cl.value))
                                   ? cplx(cl.value.real(), 0.0)
                                   : cl.value);
        std::sort(vals.begin(), vals.end(),
                  [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
        spec.lambda = {vals[0], vals[1], vals[2]};
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Separatrix curve

// Root n* of 2n^3 + 4n^2 + 6n + 3 near -0.72212 (excluded direction (1, n*)).
inline double separatrix_excluded_slope() {
    static const double nstar = [] {
        // Newton from the paper's approximate location
        double x = -0.72212;
        for (int k = 0; k < 60; ++k) {
            double f = ((2.0 * x + 4.0) * x + 6.0) * x + 3.0;
            double df = (6.0 * x + 8.0) * x + 6.0;
            double step = f / df;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        return x;
    }();
    return nstar;
}

// Angular domain J_xi = (arctan n*, arctan n* + pi) of the parametrization
// t -> xi(cos t, sin t).
inline std::pair<double, double> separatrix_domain() {
    double a = std::atan(separatrix_excluded_slope());
    return {a, a + pi};
}

// xi~(t) = xi(cos t, sin t); the homogeneous degree-zero formulas stay real
// on J_xi because d(t) > 0 there.
inline std::array<double, 2> separatrix(double t, const Tolerances& tol = default_tolerances()) {
    auto [lo, hi] = separatrix_domain();
    if (!(t > lo && t < hi))
        throw DomainError("separatrix: parameter outside (arctan n*, arctan n* + pi)");
    const double m = std::cos(t), n = std::sin(t);
    const double d = ((3.0 * m + 6.0 * n) * m + 4.0 * n * n) * m + 2.0 * n * n * n;
    if (std::abs(d) < 1e-300)
        throw DomainError("separatrix: excluded direction (denominator vanishes)");
    const double q = 3.0 * m * m + 2.0 * m * n + n * n;
    const double cb_nq = std::cbrt(n * q);
    const double cb_d = std::cbrt(d);
    const double x1 = 6.0 * std::cbrt(2.0) * m * (cb_nq * cb_nq * cb_nq * cb_nq) /
                      (cb_d * cb_d * cb_d * cb_d * cb_d);
    const double x2 = -36.0 * n * q * (((4.0 * m + 3.0 * n) * m + 2.0 * n * n) * m + n * n * n) / (d * d);
    (void)tol;
    return {x1, x2};
}

// min_t |c - xi~(t)|, by coarse scan plus golden-section refinement.
inline double separatrix_distance(const Modulus& c, double* t_best = nullptr) {
    auto [lo, hi] = separatrix_domain();
    const double margin = 1e-6;
    const int n_scan = 4000;
    auto dist2 = [&](double t) {
        auto p = separatrix(t);
        return sq(p[0] - c.c1) + sq(p[1] - c.c2);
    };
    double best_t = lo + margin, best = dist2(best_t);
    for (int k = 1; k <= n_scan; ++k) {
        double t = lo + margin + (hi - lo - 2.0 * margin) * k / n_scan;
        double d = dist2(t);
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    double a = std::max(lo + margin, best_t - (hi - lo) / n_scan);
    double b = std::min(hi - margin, best_t + (hi - lo) / n_scan);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = dist2(x1), f2 = dist2(x2);
    for (int it = 0; it < 120 && (b - a) > 1e-15; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = dist2(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = dist2(x2);
        }
    }
    double t = 0.5 * (a + b);
    if (t_best) *t_best = t;
    return std::sqrt(dist2(t));
}

struct GeneralityCheck {
    bool general;
    double delta1;
    double delta2;
    double margin1; // |delta1| relative to its monomial scale
    double margin2;
};

// general <=> Delta1(c) * Delta2(c) != 0 beyond tolerance
inline GeneralityCheck is_general(const Modulus& c, const Tolerances& tol = default_tolerances()) {
    GeneralityCheck g;
    g.delta1 = discriminant1(c);
    g.delta2 = discriminant2(c);
    g.margin1 = std::abs(g.delta1) / discriminant1_scale(c);
    g.margin2 = std::abs(g.delta2) / discriminant2_scale(c);
    g.general = g.margin1 > tol.boundary_band && g.margin2 > tol.boundary_band;
    return g;
}

inline Classification classify(const Modulus& c, const Tolerances& tol = default_tolerances()) {
    Classification cl;
    QuinticSpectrum spec = quintic_roots(c, tol);

    if (spec.has_multiple_real_root())
        cl.phase = Phase::C;
    else if (spec.simple_real_count() == 3)
        cl.phase = Phase::B;
    else
        cl.phase = Phase::A;

    cl.delta1 = discriminant1(c);
    cl.delta2 = discriminant2(c);
    const double band1 = tol.boundary_band * discriminant1_scale(c);
    cl.orbit = cl.delta1 > band1 ? OrbitType::OT1 : (cl.delta1 < -band1 ? OrbitType::OT2 : OrbitType::OT3);

    cl.separatrix_distance = separatrix_distance(c);
    const double band = tol.boundary_band;
    const bool on_oy = std::abs(c.c1) <= band;
    const bool near_xi = cl.separatrix_distance <= band;

    if (cl.phase == Phase::C) {
        cl.region = on_oy ? Region::Oy : Region::Xi;
    } else if (near_xi || on_oy) {
        cl.region = Region::Boundary;
    } else if (cl.phase == Phase::B) {
        if (c.c1 < -band)
            cl.region = Region::MPrimePlus;
        else if (c.c2 > band)
            cl.region = Region::MSecondPlus;
        else if (c.c2 < -band)
            cl.region = Region::MThirdPlus;
        else
            cl.region = Region::Boundary;
    } else {
        cl.region = c.c1 < -band ? Region::MPrimeMinus : Region::MSecondMinus;
    }

    const int j = cl.orbit == OrbitType::OT1 ? 0 : (cl.orbit == OrbitType::OT2 ? 1 : 2);
    switch (cl.phase) {
        case Phase::A:
            cl.curve_classes = {static_cast<CurveClass>(static_cast<int>(CurveClass::A1) + j)};
            break;
        case Phase::B:
            cl.curve_classes = {static_cast<CurveClass>(static_cast<int>(CurveClass::BPrime1) + j),
                                static_cast<CurveClass>(static_cast<int>(CurveClass::BSecond1) + j)};
            break;
        case Phase::C:
            cl.curve_classes = {static_cast<CurveClass>(static_cast<int>(CurveClass::C1) + j)};
            break;
    }
    return cl;
}

} // namespace crtwist
