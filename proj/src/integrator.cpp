#include "nlqwalk/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlqwalk {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
// b - b_hat: weights of the embedded 4th-order error estimate.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
// Dense-output weights of the quartic interpolant.
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

double min_step_at(double t) {
  return 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
}

void validate_controls(const StepControls& ctl) {
  if (!(ctl.rel_tol > 0.0) || !(ctl.abs_tol > 0.0))
    throw std::invalid_argument("integrator tolerances must be positive");
  if (!(ctl.max_step > 0.0))
    throw std::invalid_argument("integrator max_step must be positive");
  if (ctl.max_steps <= 0)
    throw std::invalid_argument("integrator max_steps must be positive");
}

void validate_samples(double t0, double t_end, double dir,
                      std::span<const double> samples) {
  const double tol = 1e-9 * std::max({1.0, std::abs(t0), std::abs(t_end)});
  double prev = t0 - dir * tol;
  for (double s : samples) {
    if (dir * (s - prev) <= 0.0)
      throw std::invalid_argument(
          "sample times must be strictly sorted in the integration direction");
    if (dir * (s - t0) < -tol || dir * (t_end - s) < -tol)
      throw std::invalid_argument("sample time outside integration interval");
    prev = s;
  }
}

// Weighted RMS of the error estimate against abs/rel tolerances.
double error_norm(const ComplexVector& err, const ComplexVector& y0,
                  const ComplexVector& y1, double rel_tol, double abs_tol) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < err.size(); ++j) {
    const double scale =
        abs_tol + rel_tol * std::max(std::abs(y0[j]), std::abs(y1[j]));
    const double r = std::abs(err[j]) / scale;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace

ComplexVector integrate_dopri5(const OdeRhs& f, double t0, ComplexVector y0,
                               double t_end, const StepControls& ctl,
                               std::span<const double> sample_times,
                               const SampleCallback& on_sample) {
  validate_controls(ctl);
  if (t_end == t0)
    throw std::invalid_argument("integration interval is empty (t_end == t0)");
  const double dir = t_end > t0 ? 1.0 : -1.0;
  validate_samples(t0, t_end, dir, sample_times);

  const Eigen::Index n = y0.size();
  const double end_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  std::size_t next_sample = 0;
  // Samples coinciding with the start emit the initial state directly.
  while (next_sample < sample_times.size() &&
         std::abs(sample_times[next_sample] - t0) <= end_tol) {
    if (on_sample) on_sample(sample_times[next_sample], y0);
    ++next_sample;
  }

  ComplexVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  ComplexVector y_stage(n), y1(n), err(n);
  ComplexVector rc1(n), rc2(n), rc3(n), rc4(n), rc5(n);  // dense-output coeffs

  double t = t0;
  f(t, y0, k1);  // FSAL: k1 of the next step is k7 of the last accepted one
  double h = dir * std::min(ctl.max_step, std::abs(t_end - t0));
  bool last_rejected = false;
  long steps = 0;

  while (dir * (t_end - t) > end_tol) {
    h = dir * std::min(std::abs(h), std::abs(t_end - t));
    const bool hits_end = std::abs(t + h - t_end) <= end_tol ||
                          std::abs(h) >= std::abs(t_end - t);
    if (std::abs(h) < min_step_at(t))
      throw StiffnessError("adaptive step size underflow at t = " +
                               std::to_string(t),
                           t);
    if (++steps > ctl.max_steps)
      throw StiffnessError("step budget exhausted at t = " + std::to_string(t),
                           t);

    y_stage = y0 + h * (kA21 * k1);
    f(t + kC2 * h, y_stage, k2);
    y_stage = y0 + h * (kA31 * k1 + kA32 * k2);
    f(t + kC3 * h, y_stage, k3);
    y_stage = y0 + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    f(t + kC4 * h, y_stage, k4);
    y_stage = y0 + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    f(t + kC5 * h, y_stage, k5);
    y_stage = y0 + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    f(t + h, y_stage, k6);
    y1 = y0 + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    f(t + h, y1, k7);

    err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    const double err_norm_val = error_norm(err, y0, y1, ctl.rel_tol, ctl.abs_tol);

    if (!std::isfinite(err_norm_val)) {
      h *= kMinFactor;
      last_rejected = true;
      continue;
    }
    if (err_norm_val > 1.0) {
      const double factor =
          std::max(kMinFactor, kSafety * std::pow(err_norm_val, -0.2));
      h *= factor;
      last_rejected = true;
      continue;
    }

    // Accepted. Emit samples covered by [t, t+h] through the interpolant.
    const double t_new = hits_end ? t_end : t + h;
    bool dense_ready = false;
    while (next_sample < sample_times.size() &&
           dir * (sample_times[next_sample] - t_new) <= end_tol) {
      const double s = sample_times[next_sample];
      if (std::abs(s - t_new) <= end_tol) {
        if (on_sample) on_sample(s, y1);
      } else {
        if (!dense_ready) {
          rc1 = y0;
          rc2 = y1 - y0;
          rc3 = h * k1 - rc2;
          rc4 = rc2 - h * k7 - rc3;
          rc5 = h * (kD1 * k1 + kD3 * k3 + kD4 * k4 + kD5 * k5 + kD6 * k6 +
                     kD7 * k7);
          dense_ready = true;
        }
        const double theta = (s - t) / h;
        const double theta1 = 1.0 - theta;
        y_stage = rc1 + theta * (rc2 + theta1 * (rc3 + theta * (rc4 + theta1 * rc5)));
        if (on_sample) on_sample(s, y_stage);
      }
      ++next_sample;
    }

    t = t_new;
    y0.swap(y1);
    k1.swap(k7);

    double factor = err_norm_val == 0.0
                        ? kMaxFactor
                        : std::min(kMaxFactor,
                                   std::max(kMinFactor,
                                            kSafety * std::pow(err_norm_val, -0.2)));
    if (last_rejected) factor = std::min(factor, 1.0);
    last_rejected = false;
    h = dir * std::min(ctl.max_step, std::abs(h) * factor);
  }

  // Stragglers within tolerance of t_end.
  while (next_sample < sample_times.size()) {
    if (on_sample) on_sample(sample_times[next_sample], y0);
    ++next_sample;
  }
  return y0;
}

ComplexVector integrate_rk4(const OdeRhs& f, double t0, ComplexVector y0,
                            double t_end, double step, long max_steps,
                            std::span<const double> sample_times,
                            const SampleCallback& on_sample) {
  if (!(step > 0.0)) throw std::invalid_argument("rk4 step must be positive");
  if (max_steps <= 0) throw std::invalid_argument("rk4 max_steps must be positive");
  if (t_end == t0)
    throw std::invalid_argument("integration interval is empty (t_end == t0)");
  const double dir = t_end > t0 ? 1.0 : -1.0;
  validate_samples(t0, t_end, dir, sample_times);

  const Eigen::Index n = y0.size();
  const double end_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  std::size_t next_sample = 0;
  while (next_sample < sample_times.size() &&
         std::abs(sample_times[next_sample] - t0) <= end_tol) {
    if (on_sample) on_sample(sample_times[next_sample], y0);
    ++next_sample;
  }

  ComplexVector k1(n), k2(n), k3(n), k4(n), y_stage(n);
  double t = t0;
  long steps = 0;
  while (dir * (t_end - t) > end_tol) {
    double target = t + dir * step;
    if (next_sample < sample_times.size() &&
        dir * (sample_times[next_sample] - target) < 0.0)
      target = sample_times[next_sample];
    if (dir * (t_end - target) < 0.0) target = t_end;
    const double h = target - t;
    if (++steps > max_steps)
      throw StiffnessError("step budget exhausted at t = " + std::to_string(t), t);

    f(t, y0, k1);
    y_stage = y0 + (0.5 * h) * k1;
    f(t + 0.5 * h, y_stage, k2);
    y_stage = y0 + (0.5 * h) * k2;
    f(t + 0.5 * h, y_stage, k3);
    y_stage = y0 + h * k3;
    f(t + h, y_stage, k4);
    y0 += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = target;

    while (next_sample < sample_times.size() &&
           std::abs(sample_times[next_sample] - t) <= end_tol) {
      if (on_sample) on_sample(sample_times[next_sample], y0);
      ++next_sample;
    }
  }
  while (next_sample < sample_times.size()) {
    if (on_sample) on_sample(sample_times[next_sample], y0);
    ++next_sample;
  }
  return y0;
}

}  // namespace nlqwalk
