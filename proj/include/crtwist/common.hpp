#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace crtwist {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Error hierarchy. Every message names the violated precondition or invariant
// so CLI diagnostics can surface it verbatim.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };

// Iteration failed to converge; message carries the residual.
struct NumericalError : Error { using Error::Error; };

// Modulus fails the Delta1*Delta2 != 0 requirement (or a denominator
// entered its guard band during integration).
struct NonGeneralError : Error { using Error::Error; };

struct SingularIntegrandError : Error { using Error::Error; };
struct AccuracyError : Error { using Error::Error; };
struct DegeneracyError : Error { using Error::Error; };
struct UndersamplingError : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// Shared numerical tolerances. Defaults are the ones all published-value
// regressions were validated against; override per call where needed.
struct Tolerances {
    double root_residual = 1e-8;   // |P(root)| bound, relative to coefficient scale
    double root_cluster = 1e-7;    // roots merge when closer than this * (1+|root|)
    double boundary_band = 1e-6;   // region-boundary / separatrix-membership band
    double quad_tol = 1e-10;       // node-doubling plateau target
    double ode_rtol = 1e-10;
    double ode_atol = 1e-12;
    double group_tol = 1e-6;       // frame G-membership residual before correction
    double guard_band = 1e-8;      // denominator guard for non-general configurations
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

inline bool nearly_equal(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline double sq(double x) { return x * x; }

} // namespace crtwist
