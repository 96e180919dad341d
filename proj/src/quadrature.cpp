#include "nrayleigh/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nray {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct RulePair {
    double kronrod = 0.0;
    double gauss = 0.0;
};

RulePair gk15(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);

    const double fc = f(mid);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;

    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    return {kronrod * half, gauss * half};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol_abs,
             int depth, int max_depth) {
    const RulePair r = gk15(f, a, b);
    const double err = std::fabs(r.kronrod - r.gauss);
    const double width_floor = std::max(std::fabs(a), std::fabs(b)) * 4e-16;
    if (err <= tol_abs || (b - a) <= width_floor) {
        return r.kronrod;
    }
    if (depth >= max_depth) {
        throw ConvergenceError("integrate_adaptive: tolerance not met within depth budget");
    }
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, 0.5 * tol_abs, depth + 1, max_depth) +
           adapt(f, mid, b, 0.5 * tol_abs, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth) {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("integrate_adaptive: rel_tol must be > 0");
    if (max_depth < 1) throw std::invalid_argument("integrate_adaptive: max_depth must be >= 1");
    if (a == b) return 0.0;

    const RulePair first = gk15(f, a, b);
    const double scale = std::max(std::fabs(first.kronrod),
                                  std::numeric_limits<double>::min() * 1e4);
    return adapt(f, a, b, rel_tol * scale, 0, max_depth);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw std::invalid_argument("MonotoneCubic: need >= 2 matching nodes");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(x_[i + 1] > x_[i])) {
            throw std::invalid_argument("MonotoneCubic: abscissae must strictly increase");
        }
    }

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }

    d_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }

    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) {
            d = 0.0;
        } else if (d0 * d1 <= 0.0 && std::fabs(d) > 3.0 * std::fabs(d0)) {
            d = 3.0 * d0;
        }
        return d;
    };
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
    } else {
        d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
}

double MonotoneCubic::operator()(double x) const {
    if (x_.empty()) throw std::logic_error("MonotoneCubic: empty interpolant");
    if (x <= x_.front()) {
        return y_.front() + d_.front() * (x - x_.front());
    }
    if (x >= x_.back()) {
        return y_.back();
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;

    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

}  // namespace nray
