#include "nrayleigh/specialfn.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "nrayleigh/quadrature.hpp"

namespace nray {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// Log-z grid bounds for the tabulated recursion levels.  Above the top
// the CDF is 1 to well below double precision for every supported n;
// below the bottom the log-CDF is asymptotically linear in log z and the
// interpolant extrapolates with its end slope.
constexpr double kGridLo = -45.0;
constexpr double kGridHi = 14.0;
constexpr double kGridStep = 0.05;

double e1_series(double x) {
    // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!)
    double sum = 0.0;
    double term = 1.0;  // x^k / k!
    for (int k = 1; k <= 60; ++k) {
        term *= x / k;
        const double contrib = term / k;
        sum += (k % 2 == 1) ? contrib : -contrib;
        if (contrib < 1e-17 * std::max(1.0, sum)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

double e1_continued_fraction(double x) {
    // E1(x) = e^{-x} / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...))), evaluated
    // with the modified Lentz algorithm.
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k <= 200; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = a * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

// One tabulated recursion level: ln F_n as a monotone function of ln z.
struct CdfTable {
    MonotoneCubic log_cdf;

    double eval(double z) const {
        if (z <= 0.0) return 0.0;
        const double lf = log_cdf(std::log(z));
        return lf >= 0.0 ? 1.0 : std::exp(lf);
    }
};

// One recursion step I(z) = int_0^inf inner(z/t) e^{-t} dt in log space
// (t = e^s), where the transition of the CDF-like `inner` sits near
// s = ln z with O(1) width no matter how small z is.  The left tail
// behaves like e^s (inner -> 1) and the right one is cut by e^{-e^s};
// both truncations are budgeted against a conservative lower bound on
// I(z) itself (every level's CDF is at least ~min(z, 0.5)/20).  The
// range is integrated panel by panel so each adaptive call sees the
// local scale instead of one 15-point estimate of an ~80-unit interval.
template <typename Inner>
double convolve_exp(const Inner& inner, double z, double rel_tol, int max_depth) {
    if (z <= 0.0) return 0.0;
    const double floor_est = std::max(std::min(z, 0.5) * 0.05, 1e-280);
    const double budget = rel_tol * floor_est * 0.01;
    const double t_hi = std::log(1.0 / budget) + 5.0;
    const double s_hi = std::log(t_hi);
    const double s_lo = std::max(std::min(std::log(budget), s_hi - 2.0), -700.0);

    const auto f = [&inner, z](double s) {
        const double t = std::exp(s);
        if (t == 0.0) return 0.0;
        return inner(z / t) * std::exp(-t) * t;
    };
    double value = 0.0;
    const double panel = 2.0;
    for (double a = s_lo; a < s_hi; a += panel) {
        const double b = std::min(a + panel, s_hi);
        value += integrate_adaptive(f, a, b, rel_tol, max_depth);
    }
    return std::min(value, 1.0);
}

// F_2 directly from the recursion over the closed single-variable form.
double cdf_level2(double z, const CdfEvalOptions& opts) {
    return convolve_exp([](double x) { return -std::expm1(-x); }, z, opts.rel_tol,
                        opts.max_depth);
}

// Integrate the previous level against the exponential weight.
double cdf_next_level(const CdfTable& prev, double z, const CdfEvalOptions& opts,
                      double rel_tol) {
    return convolve_exp([&prev](double x) { return prev.eval(x); }, z, rel_tol,
                        opts.max_depth);
}

CdfTable build_table_level2(const CdfEvalOptions& opts) {
    std::vector<double> w, lf;
    const int count = static_cast<int>((kGridHi - kGridLo) / kGridStep) + 1;
    w.reserve(count);
    lf.reserve(count);
    CdfEvalOptions tight = opts;
    tight.rel_tol = std::max(opts.rel_tol * 0.1, 1e-13);
    for (int i = 0; i < count; ++i) {
        const double wi = kGridLo + i * kGridStep;
        w.push_back(wi);
        lf.push_back(std::log(cdf_level2(std::exp(wi), tight)));
    }
    return CdfTable{MonotoneCubic(std::move(w), std::move(lf))};
}

CdfTable build_table_next(const CdfTable& prev, const CdfEvalOptions& opts) {
    std::vector<double> w, lf;
    const int count = static_cast<int>((kGridHi - kGridLo) / kGridStep) + 1;
    w.reserve(count);
    lf.reserve(count);
    const double node_tol = std::max(opts.rel_tol * 0.1, 1e-13);
    for (int i = 0; i < count; ++i) {
        const double wi = kGridLo + i * kGridStep;
        w.push_back(wi);
        lf.push_back(std::log(cdf_next_level(prev, std::exp(wi), opts, node_tol)));
    }
    return CdfTable{MonotoneCubic(std::move(w), std::move(lf))};
}

// Tables for levels 2..n-1, shared across calls with identical options.
using TableChain = std::vector<CdfTable>;

std::shared_ptr<const TableChain> table_chain(int n, const CdfEvalOptions& opts) {
    static std::mutex mutex;
    static std::map<double, std::shared_ptr<TableChain>> cache;

    // Tables for levels 2..n-1; existing chains are extended copy-on-write
    // so concurrent readers keep their immutable snapshots.
    const std::size_t want = static_cast<std::size_t>(n) - 2;
    std::lock_guard<std::mutex> lock(mutex);
    auto& entry = cache[opts.rel_tol];
    if (!entry || entry->size() < want) {
        auto chain = std::make_shared<TableChain>(entry ? *entry : TableChain{});
        if (chain->empty()) chain->push_back(build_table_level2(opts));
        while (chain->size() < want) {
            chain->push_back(build_table_next(chain->back(), opts));
        }
        entry = std::move(chain);
    }
    return entry;
}

}  // namespace

void CdfEvalOptions::validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-2) {
        throw std::invalid_argument("CdfEvalOptions: rel_tol must lie in (0, 1e-2]");
    }
    if (max_depth < 1) {
        throw std::invalid_argument("CdfEvalOptions: max_depth must be >= 1");
    }
}

double gamma_upper_zero(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_upper_zero: x must be > 0");
    if (x >= 700.0) return 0.0;  // below double underflow once e^{-x} joins
    return x < 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

double product_exp_cdf(double z, int n, const CdfEvalOptions& opts) {
    opts.validate();
    if (n < 1) throw std::domain_error("product_exp_cdf: n must be >= 1");
    if (z < 0.0 || !std::isfinite(z)) {
        throw std::domain_error("product_exp_cdf: z must be finite and >= 0");
    }
    if (z == 0.0) return 0.0;
    if (n == 1) return -std::expm1(-z);
    if (n == 2) return cdf_level2(z, opts);

    const auto chain = table_chain(n, opts);
    const CdfTable& prev = (*chain)[static_cast<std::size_t>(n) - 3];
    return cdf_next_level(prev, z, opts, opts.rel_tol);
}

double cdf_product_rayleigh(double y, const CascadeSpec& cascade, const CdfEvalOptions& opts) {
    if (y < 0.0 || !std::isfinite(y)) {
        throw std::domain_error("cdf_product_rayleigh: y must be finite and >= 0");
    }
    cascade.validate();
    const double z = y * y / phi(cascade);
    return product_exp_cdf(z, static_cast<int>(cascade.size()), opts);
}

double bessel_k1(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k1: x must be > 0");
    const double t_max = std::acosh(std::max(3.0, 60.0 / x));
    return integrate_adaptive(
        [x](double t) {
            const double ch = std::cosh(t);
            return std::exp(-x * ch) * ch;
        },
        0.0, t_max, 1e-13, 60);
}

}  // namespace nray
