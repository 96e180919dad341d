#include "nrayleigh/exact.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <vector>

#include "nrayleigh/quadrature.hpp"

namespace nray {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogClamp = 46.0;  // drop integrand once exp argument falls this far

// The rate integral in log-substituted coordinates u (dimension N-1),
// with z = y^2/Phi and S = sum(u):
//   rate = 2^{N-1/2} * sqrt(pi) * sqrt(z) * integral g(u) du,
//   g(u) = sqrt(fN^2 + z e^{-2S} sum_i f_i^2 e^{-2u_i})
//          * exp(-z e^{-2S} - sum_i e^{2u_i} + S).
struct MappedIntegrand {
    std::vector<double> f_sq_head;  // f_i^2, i = 1..N-1
    double f_sq_last = 0.0;         // f_N^2
    double z = 0.0;

    // Exponent split off at the critical point so deep thresholds stay
    // in range; log_center = exponent value at the critical point.
    double log_center = 0.0;

    double log_scaled(const std::vector<double>& u) const {
        double s = 0.0, sum_exp = 0.0;
        for (double ui : u) {
            s += ui;
            sum_exp += std::exp(2.0 * ui);
        }
        return -z * std::exp(-2.0 * s) - sum_exp + s - log_center;
    }

    double bracket(const std::vector<double>& u) const {
        double s = 0.0;
        for (double ui : u) s += ui;
        double sum = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            sum += f_sq_head[i] * std::exp(-2.0 * u[i]);
        }
        return std::sqrt(f_sq_last + z * std::exp(-2.0 * s) * sum);
    }

    // Scaled integrand: g(u) * exp(-log_center).
    double operator()(const std::vector<double>& u) const {
        const double lg = log_scaled(u);
        if (lg < -kLogClamp) return 0.0;
        return bracket(u) * std::exp(lg);
    }
};

struct Box {
    std::vector<double> lo, hi;
};

// Scan outward from the critical point until the scaled exponent has
// dropped below the clamp in every axis direction, then widen to the
// full valley extent.  The axis scan alone is not enough in dimension
// >= 2: one coordinate can fall while the others rise to keep the sum
// S = sum(u) (and with it the e^{ln z - 2S} barrier) alive, so the
// integrand decays only like e^{u_i} along those compensated corners.
// The barrier kills everything once a single coordinate passes
// ln(z)/2 (S cannot stay above it from there), and the e^{2u_i}
// penalty kills the high side past max(u*, 0); fixed margins beyond
// both bounds push the corner truncation error below 1e-6 relative.
Box scan_box(const MappedIntegrand& g, double u_star, std::size_t dim) {
    Box box;
    box.lo.assign(dim, 0.0);
    box.hi.assign(dim, 0.0);
    std::vector<double> u(dim, u_star);
    for (std::size_t i = 0; i < dim; ++i) {
        for (int sign = -1; sign <= 1; sign += 2) {
            double t = 0.25;
            while (t < 60.0) {
                u[i] = u_star + sign * t;
                if (g.log_scaled(u) < -(kLogClamp + 2.0)) break;
                t += 0.25;
            }
            u[i] = u_star;
            (sign < 0 ? box.lo[i] : box.hi[i]) = u_star + sign * (t + 0.5);
        }
    }
    if (dim >= 2) {
        const double valley_lo = 0.5 * std::log(g.z) - 4.5;
        const double valley_hi = std::max(u_star, 0.0) + 2.25;
        for (std::size_t i = 0; i < dim; ++i) {
            box.lo[i] = std::min(box.lo[i], valley_lo);
            box.hi[i] = std::max(box.hi[i], valley_hi);
        }
    }
    return box;
}

double tensor_trapezoid(const MappedIntegrand& g, const Box& box, int nodes) {
    const std::size_t dim = box.lo.size();
    std::vector<double> step(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        step[i] = (box.hi[i] - box.lo[i]) / (nodes - 1);
    }

    std::vector<int> idx(dim, 0);
    std::vector<double> u(dim);
    double sum = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < dim; ++i) {
            u[i] = box.lo[i] + idx[i] * step[i];
            w *= (idx[i] == 0 || idx[i] == nodes - 1) ? 0.5 * step[i] : step[i];
        }
        sum += w * g(u);

        std::size_t d = 0;
        while (d < dim && ++idx[d] == nodes) {
            idx[d] = 0;
            ++d;
        }
        if (d == dim) break;
    }
    return sum;
}

MappedIntegrand build_integrand(const CascadeSpec& cascade, double y) {
    const std::vector<double> omegas = effective_powers(cascade);
    const std::vector<double> dopplers = effective_dopplers(cascade);
    const std::size_t n = omegas.size();

    MappedIntegrand g;
    g.z = y * y / phi(omegas);
    g.f_sq_head.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) g.f_sq_head[i] = dopplers[i] * dopplers[i];
    g.f_sq_last = dopplers[n - 1] * dopplers[n - 1];

    // Exponent at the critical point u_i = ln(z)/(2N): all three exponent
    // pieces evaluate in closed form there.
    const double nn = static_cast<double>(n);
    const double u_star = std::log(g.z) / (2.0 * nn);
    const double m = nn - 1.0;
    g.log_center = -nn * std::pow(g.z, 1.0 / nn) + m * u_star;
    return g;
}

double rate_prefactor(std::size_t n, double z, double log_center) {
    return std::pow(2.0, static_cast<double>(n) - 0.5) * std::sqrt(kPi) * std::sqrt(z) *
           std::exp(log_center);
}

void check_supported(const CascadeSpec& cascade, double y) {
    cascade.validate();
    if (!(y > 0.0)) throw std::domain_error("exact_lcr: y must be > 0");
    const std::size_t n = cascade.size();
    if (n < 2 || n > 4) {
        throw std::invalid_argument(
            "exact_lcr: supported for 2 <= N <= 4 hops only (use the Laplace or "
            "simulation paths beyond that)");
    }
    if (!(doppler_sum_sq(cascade) > 0.0)) {
        throw std::domain_error("exact_lcr: static channel (all Doppler shifts zero)");
    }
    if (n == 4) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true)) {
            std::cerr << "note: exact rate at N = 4 integrates a dense 3-D grid; "
                         "expect seconds per threshold\n";
        }
    }
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-3) {
        throw std::invalid_argument("QuadratureSpec: rel_tol must lie in (0, 1e-3]");
    }
    if (node_budget < 16) {
        throw std::invalid_argument("QuadratureSpec: node budget must be >= 16 per dimension");
    }
}

double exact_lcr(const CascadeSpec& cascade, double y, const QuadratureSpec& q) {
    q.validate();
    check_supported(cascade, y);

    const std::size_t n = cascade.size();
    const std::size_t dim = n - 1;
    MappedIntegrand g = build_integrand(cascade, y);
    const double u_star = std::log(g.z) / (2.0 * static_cast<double>(n));

    Box box = scan_box(g, u_star, dim);
    if (q.mapping == MappingTag::LogSubstitution) {
        // Origin-centered layout: widen the box to include the
        // substitution origin with margin.
        for (std::size_t i = 0; i < dim; ++i) {
            box.lo[i] = std::min(box.lo[i], -1.0);
            box.hi[i] = std::max(box.hi[i], 1.0);
        }
    }

    double prev = tensor_trapezoid(g, box, 16);
    for (int nodes = 32; nodes <= q.node_budget; nodes *= 2) {
        const double next = tensor_trapezoid(g, box, nodes);
        if (std::fabs(next - prev) <= q.rel_tol * std::fabs(next)) {
            return rate_prefactor(n, g.z, g.log_center) * next;
        }
        prev = next;
    }
    throw ConvergenceError("exact_lcr: refinement did not reach tolerance within budget");
}

double exact_lcr_dualhop(const CascadeSpec& cascade, double y, const QuadratureSpec& q) {
    q.validate();
    check_supported(cascade, y);
    if (cascade.size() != 2) {
        throw std::invalid_argument("exact_lcr_dualhop: cascade must have exactly 2 hops");
    }

    MappedIntegrand g = build_integrand(cascade, y);
    const double u_star = std::log(g.z) / 4.0;
    const Box box = scan_box(g, u_star, 1);

    std::vector<double> u(1);
    const double integral = integrate_adaptive(
        [&g, &u](double t) mutable {
            u[0] = t;
            return g(u);
        },
        box.lo[0], box.hi[0], q.rel_tol, 48);
    return rate_prefactor(2, g.z, g.log_center) * integral;
}

double exact_afd(const CascadeSpec& cascade, double y, const QuadratureSpec& q,
                 const CdfEvalOptions& cdf_opts) {
    const double rate = exact_lcr(cascade, y, q);
    return cdf_product_rayleigh(y, cascade, cdf_opts) / rate;
}

}  // namespace nray
