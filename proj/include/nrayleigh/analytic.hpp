#pragma once
// Closed-form Laplace-approximation level crossing rate / average fade
// duration for the product of N Rayleigh envelopes, the critical-point
// and Hessian apparatus behind it, equal-parameter special cases, and a
// generic Laplace approximation engine with numeric verification hooks.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nrayleigh/core.hpp"
#include "nrayleigh/specialfn.hpp"

namespace nray {

// ----------------------------------------------- critical point / Hessian

/// Interior critical point of the crossing-rate integrand's exponent for
/// a cascade with N >= 2 hops and threshold y > 0:
///   x_i = y^{1/N} * sqrt(Omega_i) / Phi^{1/(2N)},  i = 1..N-1.
/// Throws std::invalid_argument for N = 1 (no free variables).
std::vector<double> lcr_critical_point(const CascadeSpec& cascade, double y);

/// Hessian of the exponent at the critical point, with its closed-form
/// eigenvalue list and determinant.
struct LcrHessian {
    Eigen::MatrixXd matrix;                    ///< A_ii = 8/Omega_i, A_ij = 4/sqrt(Omega_i*Omega_j)
    std::vector<double> analytic_eigenvalues;  ///< {4/Omega_i (i <= N-2), 4N/Omega_{N-1}}
    double analytic_det = 0.0;                 ///< N * 2^{2(N-1)} / prod_{k<N} Omega_k
};

/// Assemble the (N-1)x(N-1) Hessian for the cascade's effective powers.
/// The determinant formula holds for any powers; the closed-form
/// eigenvalue list is exact only when the first N-1 effective powers are
/// all equal (its trace matches the matrix only then), which is how the
/// cross-checks exercise it.  Throws std::invalid_argument for N = 1.
LcrHessian lcr_hessian(const CascadeSpec& cascade);

// ------------------------------------------------------------ closed forms

/// Laplace-approximation level crossing rate,
///   sqrt(sum f_i^2 / N) * (2*pi)^{N/2} * y / sqrt(Phi)
///     * exp(-N * (y^2/Phi)^{1/N}).
/// Throws std::domain_error for y <= 0 or an all-static cascade.
double laplace_lcr(const CascadeSpec& cascade, double y);

/// Classic single-hop Rayleigh level crossing rate
///   f1 * sqrt(2*pi) * (y/sqrt(omega)) * exp(-y^2/omega);
/// the N = 1 reduction target and the simulator calibration reference.
double rayleigh_lcr(double omega, double f1, double y);

/// Average fade duration as CDF / LCR, which makes the
/// afd * lcr = cdf identity hold bit-exactly by construction.
double laplace_afd(const CascadeSpec& cascade, double y, const CdfEvalOptions& opts = {});

/// Equal-parameter closed forms.  `power` is the power product Phi for
/// the two mobility scenarios and the common per-hop power for the iid
/// scenario (whose Phi is power^n).
enum class SpecialScenario {
    AllMobileEqualDoppler,         ///< every node mobile at fm: prefactor sqrt(2)*fm
    FixedDestinationEqualDoppler,  ///< destination fixed: prefactor fm*sqrt((2N-1)/N)
    IidEqualPower,                 ///< N iid hops, common Doppler fm: prefactor fm
};

/// Evaluates the tagged closed form; must equal laplace_lcr of the
/// equivalently built cascade to 1e-12 relative.  Throws
/// std::invalid_argument for an unknown tag or invalid parameters.
double special_case_lcr(SpecialScenario scenario, int n_hops, double fm, double power,
                        double y);

// ------------------------------------------------- generic Laplace engine

/// Integral J(lambda) = integral u(x) exp(-lambda*h(x)) dx over n
/// variables, approximated around the interior minimum of h.
struct LaplaceProblem {
    int dimension = 1;
    std::function<double(const Eigen::VectorXd&)> u;
    std::function<double(const Eigen::VectorXd&)> h;
    double lambda = 1.0;
};

struct LaplaceResult {
    Eigen::VectorXd critical_point;
    Eigen::MatrixXd hessian;    ///< central finite differences at the minimum
    double det_a = 0.0;
    double u_at_crit = 0.0;
    double h_at_crit = 0.0;
    double approx_value = 0.0;  ///< (2*pi/lambda)^{n/2} * u / sqrt(det) * exp(-lambda*h)
};

/// Minimizes h by damped Newton descent from x0 (gradient norm reduced to
/// <= 1e-8 scaled), differentiates it centrally (step per component
/// max(1e-5*|x_i|, 1e-7)), verifies positive definiteness through an
/// eigenvalue check, and assembles the approximation.  Throws
/// ConvergenceError when the minimizer stalls and std::domain_error when
/// the Hessian is not positive definite.
LaplaceResult generic_laplace_approx(const LaplaceProblem& p, const Eigen::VectorXd& x0);

/// The crossing-rate integrand of a cascade at threshold y as a
/// LaplaceProblem over the first N-1 envelope variables (normalized so
/// that the full rate is prefactor * J(1) with
/// prefactor = 2^N * y * sigma_dot_N / (sqrt(2*pi) * Phi)).
LaplaceProblem lcr_laplace_problem(const CascadeSpec& cascade, double y);

}  // namespace nray
