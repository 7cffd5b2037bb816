#pragma once

#include <optional>

namespace nlqwalk {

/// The trapping bound function
///   f(x) = 2 sqrt(deg_r) / sqrt(x (1 - x)) + 2 / x,   x in (0, 1),
/// where deg_r is the degree of the walk's initial vertex. Values of x with
/// f(x) < |g| are unreachable for the probability at that vertex, which is
/// what makes self-trapping provable: once |g| exceeds the minimum of f, the
/// probability can never cross the forbidden window.
double bound_function(int deg_r, double x);

/// d f / d x; strictly increasing through its unique zero on (0, 1).
double bound_function_derivative(int deg_r, double x);

struct BoundMinimum {
  double p_star;  ///< argmin of f on (0, 1)
  double f_min;   ///< f(p_star)
};

/// Locates the unique minimum of f by bisecting its derivative. p_star is
/// accurate to 1e-10 absolute; for deg_r = 2 the exact values are
/// p_star = 2/3, f_min = 9.
BoundMinimum minimize_bound(int deg_r);

/// Roots of f(x) = |g| and the trapping guarantee they carry.
/// When g_abs > f_min there are two roots p_minus < p_star < p_plus and the
/// probability at the initial vertex stays >= p_plus for all time. When
/// g_abs <= f_min (including exact equality, where the two roots coincide)
/// no guarantee is available and both roots are absent.
struct TrapBoundResult {
  int deg_r = 0;
  double g_abs = 0.0;
  double p_star = 0.0;
  double f_min = 0.0;
  std::optional<double> p_minus;
  std::optional<double> p_plus;

  bool guarantee() const noexcept { return p_plus.has_value(); }
};

TrapBoundResult trap_roots(int deg_r, double g_abs);

/// Minimal |g| guaranteeing trapping probability >= p_target; equals
/// f(p_target). Requires p_star < p_target < 1, since only the branch right
/// of the argmin can serve as the guaranteed level p_plus.
double required_g(int deg_r, double p_target);

/// Upper bound on the critical nonlinearity: |g_c| <= f_min. Approximately
/// 7.22 for degree 1 and exactly 9 for degree 2.
double critical_g_upper_bound(int deg_r);

}  // namespace nlqwalk
