#include "nlqwalk/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nlqwalk {

namespace {

constexpr double kEdgeEps = 1e-12;  // bracket inset from the domain endpoints
// Absolute tolerance on x for bisection. f is steep near the domain edges
// (|f'| ~ 3e4 already at the upper root for |g| ~ 90), so a loose x
// tolerance would leak amplified into required_g round trips; 1e-13 keeps
// those below 1e-8 over the working |g| range at ~44 iterations.
constexpr double kRootTol = 1e-13;

void check_degree(int deg_r) {
  if (deg_r < 1)
    throw std::domain_error("initial-vertex degree must be >= 1, got " +
                            std::to_string(deg_r));
}

void check_open_unit(double x, const char* name) {
  if (!(x > 0.0) || !(x < 1.0))
    throw std::domain_error(std::string(name) + " must lie strictly in (0, 1), got " +
                            std::to_string(x));
}

// Bisection for a monotone function with a sign change on [lo, hi].
template <class F>
double bisect(F&& fn, double lo, double hi) {
  double flo = fn(lo);
  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at floating-point resolution
    const double fmid = fn(mid);
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double bound_function(int deg_r, double x) {
  check_degree(deg_r);
  check_open_unit(x, "x");
  return 2.0 * std::sqrt(static_cast<double>(deg_r)) / std::sqrt(x * (1.0 - x)) +
         2.0 / x;
}

double bound_function_derivative(int deg_r, double x) {
  check_degree(deg_r);
  check_open_unit(x, "x");
  const double w = x * (1.0 - x);
  return std::sqrt(static_cast<double>(deg_r)) * (2.0 * x - 1.0) /
             (w * std::sqrt(w)) -
         2.0 / (x * x);
}

BoundMinimum minimize_bound(int deg_r) {
  check_degree(deg_r);
  // f' runs from -inf at 0+ to +inf at 1-, crossing zero once (f is strictly
  // convex), so bisecting the derivative pins p_star far more tightly than
  // comparing the flat function values near the minimum could.
  const double p_star = bisect(
      [deg_r](double x) { return bound_function_derivative(deg_r, x); },
      kEdgeEps, 1.0 - kEdgeEps);
  return BoundMinimum{p_star, bound_function(deg_r, p_star)};
}

TrapBoundResult trap_roots(int deg_r, double g_abs) {
  check_degree(deg_r);
  if (!(g_abs > 0.0) || !std::isfinite(g_abs))
    throw std::domain_error("|g| must be positive and finite, got " +
                            std::to_string(g_abs));
  const BoundMinimum m = minimize_bound(deg_r);
  TrapBoundResult result;
  result.deg_r = deg_r;
  result.g_abs = g_abs;
  result.p_star = m.p_star;
  result.f_min = m.f_min;
  // The trapping argument needs |g| strictly above the minimum; at equality
  // the window degenerates to a point and no guarantee follows.
  if (!(g_abs > m.f_min)) return result;
  if (bound_function(deg_r, 1.0 - kEdgeEps) <= g_abs)
    throw std::domain_error(
        "|g| too large to resolve the upper root within (0, 1): " +
        std::to_string(g_abs));
  auto offset = [&](double x) { return bound_function(deg_r, x) - g_abs; };
  result.p_minus = bisect(offset, kEdgeEps, m.p_star);
  result.p_plus = bisect(offset, m.p_star, 1.0 - kEdgeEps);
  return result;
}

double required_g(int deg_r, double p_target) {
  check_degree(deg_r);
  if (!(p_target < 1.0))
    throw std::domain_error("target probability must be < 1, got " +
                            std::to_string(p_target));
  const BoundMinimum m = minimize_bound(deg_r);
  if (!(p_target > m.p_star))
    throw std::domain_error(
        "target probability " + std::to_string(p_target) +
        " must exceed the argmin p_star = " + std::to_string(m.p_star) +
        "; only levels right of the argmin can serve as the guaranteed p_plus");
  return bound_function(deg_r, p_target);
}

double critical_g_upper_bound(int deg_r) { return minimize_bound(deg_r).f_min; }

}  // namespace nlqwalk
