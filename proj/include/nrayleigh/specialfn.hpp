#pragma once
// Special functions behind the closed-form channel statistics: the upper
// incomplete gamma function of order zero, the CDF of a product of
// independent unit-mean exponential variables (the distribution that the
// squared product envelope follows after power normalization), and a
// Bessel-K oracle used only by tests.

#include "nrayleigh/core.hpp"

namespace nray {

/// Tolerance/depth knobs for CDF evaluation.
struct CdfEvalOptions {
    double rel_tol = 1e-9;  ///< in (0, 1e-2]
    int max_depth = 48;     ///< >= 1

    void validate() const;
};

/// Upper incomplete gamma of order zero, Gamma(0, x) = E1(x) =
/// integral_x^inf e^{-t}/t dt.  Series below 1, continued fraction from 1
/// up; relative error <= 1e-12 over [1e-6, 50].  Throws std::domain_error
/// for x <= 0.
double gamma_upper_zero(double x);

/// CDF at z of the product of n independent unit-mean exponential
/// variables, evaluated by the recursion
///   F_n(z) = integral_0^inf F_{n-1}(z/t) e^{-t} dt,  F_1(z) = 1 - e^{-z},
/// with adaptive quadrature (levels above 2 are tabulated on a log grid
/// and interpolated monotonically).  Throws std::domain_error for z < 0
/// or n < 1, ConvergenceError when the tolerance cannot be met.
double product_exp_cdf(double z, int n, const CdfEvalOptions& opts = {});

/// CDF of the product of the cascade's N Rayleigh envelopes at amplitude
/// y; equals product_exp_cdf(y^2 / phi, N) and therefore depends on the
/// inputs only through that ratio.
double cdf_product_rayleigh(double y, const CascadeSpec& cascade,
                            const CdfEvalOptions& opts = {});

/// Modified Bessel function of the second kind, order one, via the
/// integral representation integral_0^inf e^{-x cosh t} cosh t dt.
/// Test oracle only (closed form of the two-hop CDF); relative error
/// <= 1e-10 over [1e-3, 30].  Throws std::domain_error for x <= 0.
double bessel_k1(double x);

}  // namespace nray
