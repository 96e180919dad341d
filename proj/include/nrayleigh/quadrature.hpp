#pragma once
// Shared numeric kernels: adaptive Gauss-Kronrod integration and a
// monotone cubic (PCHIP) interpolant used to layer recursive integrals.

#include <functional>
#include <stdexcept>
#include <vector>

namespace nray {

/// Thrown when an iterative numeric scheme fails to reach its tolerance
/// within its depth/iteration budget.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Adaptive 15-point Gauss-Kronrod integration of `f` over [a, b] to a
/// relative tolerance (against the magnitude of the whole-interval
/// estimate).  Bisects until the Kronrod-Gauss discrepancy of every
/// subinterval is within budget; throws ConvergenceError past
/// `max_depth` bisection levels.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth = 48);

/// Monotonicity-preserving piecewise-cubic Hermite interpolant
/// (Fritsch-Carlson slopes).  Below the grid it extrapolates linearly
/// with the left endpoint slope; above the grid it clamps to the last
/// ordinate - the semantics wanted for log-CDF tables, where the left
/// tail is asymptotically linear and the right tail saturates.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;

    /// `x` strictly increasing, `y` same length (>= 2).
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    bool empty() const { return x_.empty(); }

  private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_;  // node slopes
};

}  // namespace nray
