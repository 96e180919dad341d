#include "nrayleigh/analytic.hpp"

#include <cmath>
#include <limits>

#include "nrayleigh/quadrature.hpp"

namespace nray {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

void require_multi_hop(const CascadeSpec& cascade, const char* who) {
    if (cascade.size() < 2) {
        throw std::invalid_argument(std::string(who) +
                                    ": needs at least two hops (no free variables at N = 1)");
    }
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = std::max(1e-7 * std::fabs(x[i]), 1e-9);
        probe[i] = x[i] + step;
        const double fp = f(probe);
        probe[i] = x[i] - step;
        const double fmz = f(probe);
        probe[i] = x[i];
        g[i] = (fp - fmz) / (2.0 * step);
    }
    return g;
}

Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd step(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        step[i] = std::max(1e-5 * std::fabs(x[i]), 1e-7);
    }

    Eigen::MatrixXd hess(n, n);
    const double f0 = f(x);
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        probe[i] = x[i] + step[i];
        const double fp = f(probe);
        probe[i] = x[i] - step[i];
        const double fm = f(probe);
        probe[i] = x[i];
        hess(i, i) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            probe = x;
            probe[i] += step[i];
            probe[j] += step[j];
            const double fpp = f(probe);
            probe[j] = x[j] - step[j];
            const double fpm = f(probe);
            probe[i] = x[i] - step[i];
            const double fmm = f(probe);
            probe[j] = x[j] + step[j];
            const double fmp = f(probe);
            const double value = (fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
            hess(i, j) = value;
            hess(j, i) = value;
        }
    }
    return hess;
}

double eval_or_inf(const std::function<double(const Eigen::VectorXd&)>& f,
                   const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

// ----------------------------------------------- critical point / Hessian

std::vector<double> lcr_critical_point(const CascadeSpec& cascade, double y) {
    require_multi_hop(cascade, "lcr_critical_point");
    if (!(y > 0.0)) throw std::domain_error("lcr_critical_point: y must be > 0");

    const std::vector<double> omegas = effective_powers(cascade);
    const std::size_t n = omegas.size();
    const double big_phi = phi(omegas);
    const double scale = std::pow(y, 1.0 / static_cast<double>(n)) /
                         std::pow(big_phi, 1.0 / (2.0 * static_cast<double>(n)));

    std::vector<double> x(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        x[i] = scale * std::sqrt(omegas[i]);
    }
    return x;
}

LcrHessian lcr_hessian(const CascadeSpec& cascade) {
    require_multi_hop(cascade, "lcr_hessian");

    const std::vector<double> omegas = effective_powers(cascade);
    const std::size_t n = omegas.size();
    const std::size_t m = n - 1;

    LcrHessian out;
    out.matrix.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (i == j) ? 8.0 / omegas[i] : 4.0 / std::sqrt(omegas[i] * omegas[j]);
        }
    }

    out.analytic_eigenvalues.resize(m);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        out.analytic_eigenvalues[i] = 4.0 / omegas[i];
    }
    out.analytic_eigenvalues[m - 1] = 4.0 * static_cast<double>(n) / omegas[m - 1];

    double denom = 1.0;
    for (std::size_t k = 0; k < m; ++k) denom *= omegas[k];
    out.analytic_det =
        static_cast<double>(n) * std::pow(2.0, 2.0 * static_cast<double>(m)) / denom;
    return out;
}

// ------------------------------------------------------------ closed forms

double laplace_lcr(const CascadeSpec& cascade, double y) {
    cascade.validate();
    if (!(y > 0.0)) throw std::domain_error("laplace_lcr: y must be > 0");

    const double sum_f_sq = doppler_sum_sq(cascade);
    if (!(sum_f_sq > 0.0)) {
        throw std::domain_error("laplace_lcr: static channel (all Doppler shifts zero)");
    }

    const double n = static_cast<double>(cascade.size());
    const double big_phi = phi(cascade);
    const double z = y * y / big_phi;
    return std::sqrt(sum_f_sq / n) * std::pow(kTwoPi, 0.5 * n) * y / std::sqrt(big_phi) *
           std::exp(-n * std::pow(z, 1.0 / n));
}

double rayleigh_lcr(double omega, double f1, double y) {
    if (!(omega > 0.0)) throw std::domain_error("rayleigh_lcr: omega must be > 0");
    if (!(f1 > 0.0)) throw std::domain_error("rayleigh_lcr: f1 must be > 0");
    if (!(y > 0.0)) throw std::domain_error("rayleigh_lcr: y must be > 0");
    const double r = y / std::sqrt(omega);
    return f1 * std::sqrt(kTwoPi) * r * std::exp(-r * r);
}

double laplace_afd(const CascadeSpec& cascade, double y, const CdfEvalOptions& opts) {
    const double rate = laplace_lcr(cascade, y);
    return cdf_product_rayleigh(y, cascade, opts) / rate;
}

double special_case_lcr(SpecialScenario scenario, int n_hops, double fm, double power,
                        double y) {
    if (n_hops < 1) throw std::invalid_argument("special_case_lcr: n_hops must be >= 1");
    if (!(fm > 0.0)) throw std::domain_error("special_case_lcr: fm must be > 0");
    if (!(power > 0.0)) throw std::domain_error("special_case_lcr: power must be > 0");
    if (!(y > 0.0)) throw std::domain_error("special_case_lcr: y must be > 0");

    const double n = static_cast<double>(n_hops);
    double prefactor = 0.0;
    double big_phi = power;
    switch (scenario) {
        case SpecialScenario::AllMobileEqualDoppler:
            prefactor = std::sqrt(2.0) * fm;
            break;
        case SpecialScenario::FixedDestinationEqualDoppler:
            prefactor = fm * std::sqrt((2.0 * n - 1.0) / n);
            break;
        case SpecialScenario::IidEqualPower:
            prefactor = fm;
            big_phi = std::pow(power, n);
            break;
        default:
            throw std::invalid_argument("special_case_lcr: unknown scenario tag");
    }
    const double z = y * y / big_phi;
    return prefactor * std::pow(kTwoPi, 0.5 * n) * y / std::sqrt(big_phi) *
           std::exp(-n * std::pow(z, 1.0 / n));
}

// ------------------------------------------------- generic Laplace engine

LaplaceResult generic_laplace_approx(const LaplaceProblem& p, const Eigen::VectorXd& x0) {
    if (p.dimension < 1 || x0.size() != p.dimension) {
        throw std::invalid_argument("generic_laplace_approx: dimension/start mismatch");
    }
    if (!(p.lambda > 0.0)) {
        throw std::invalid_argument("generic_laplace_approx: lambda must be > 0");
    }
    if (!p.u || !p.h) {
        throw std::invalid_argument("generic_laplace_approx: u and h must be callable");
    }

    const double g0 = std::max(1.0, fd_gradient(p.h, x0).norm());
    const double tol = 1e-8 * g0;

    Eigen::VectorXd x = x0;
    double hx = eval_or_inf(p.h, x);
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::VectorXd grad = fd_gradient(p.h, x);
        if (grad.norm() <= tol) {
            converged = true;
            break;
        }

        Eigen::MatrixXd hess = fd_hessian(p.h, x);
        Eigen::VectorXd dir;
        const Eigen::LLT<Eigen::MatrixXd> llt(hess);
        if (llt.info() == Eigen::Success) {
            dir = -llt.solve(grad);
        } else {
            dir = -grad / g0;  // fall back to scaled steepest descent
        }

        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            const Eigen::VectorXd trial = x + step * dir;
            const double ht = eval_or_inf(p.h, trial);
            if (ht < hx) {
                x = trial;
                hx = ht;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            // No descent along either direction: accept only if already at
            // the tolerance, otherwise report failure below.
            break;
        }
    }

    if (!converged && fd_gradient(p.h, x).norm() > tol) {
        throw ConvergenceError("generic_laplace_approx: minimizer did not converge");
    }

    LaplaceResult out;
    out.critical_point = x;
    out.hessian = fd_hessian(p.h, x);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.hessian);
    const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (eig.eigenvalues().minCoeff() <= 1e-12 * max_eig) {
        throw std::domain_error(
            "generic_laplace_approx: Hessian not positive definite at the minimum");
    }
    out.det_a = eig.eigenvalues().prod();
    out.u_at_crit = p.u(x);
    out.h_at_crit = p.h(x);
    const double n = static_cast<double>(p.dimension);
    out.approx_value = std::pow(kTwoPi / p.lambda, 0.5 * n) * out.u_at_crit /
                       std::sqrt(out.det_a) * std::exp(-p.lambda * out.h_at_crit);
    return out;
}

LaplaceProblem lcr_laplace_problem(const CascadeSpec& cascade, double y) {
    require_multi_hop(cascade, "lcr_laplace_problem");
    if (!(y > 0.0)) throw std::domain_error("lcr_laplace_problem: y must be > 0");

    const std::vector<double> omegas = effective_powers(cascade);
    const std::vector<double> dopplers = effective_dopplers(cascade);
    const std::size_t n = omegas.size();
    if (!(dopplers[n - 1] > 0.0)) {
        throw std::domain_error(
            "lcr_laplace_problem: the last hop must be time-varying (its derivative "
            "variance normalizes the integrand)");
    }

    // Ratios sigma_dot_i^2 / sigma_dot_N^2 for the first N-1 hops.
    std::vector<double> ratio(n - 1);
    const double sigma_n_sq =
        derivative_variance(omegas[n - 1], dopplers[n - 1]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        ratio[i] = derivative_variance(omegas[i], dopplers[i]) / sigma_n_sq;
    }
    const double omega_last = omegas[n - 1];

    LaplaceProblem p;
    p.dimension = static_cast<int>(n - 1);
    p.lambda = 1.0;
    p.u = [ratio, y](const Eigen::VectorXd& x) {
        double prod_inv_sq = 1.0;
        for (Eigen::Index k = 0; k < x.size(); ++k) prod_inv_sq /= x[k] * x[k];
        double sum = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            sum += ratio[static_cast<std::size_t>(i)] / (x[i] * x[i]);
        }
        return std::sqrt(1.0 + y * y * prod_inv_sq * sum);
    };
    p.h = [omegas, omega_last, y](const Eigen::VectorXd& x) {
        double prod_inv_sq = 1.0;
        double sum = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            prod_inv_sq /= x[i] * x[i];
            sum += x[i] * x[i] / omegas[static_cast<std::size_t>(i)];
        }
        return y * y / omega_last * prod_inv_sq + sum;
    };
    return p;
}

}  // namespace nray
