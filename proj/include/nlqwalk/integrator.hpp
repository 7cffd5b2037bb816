#pragma once

#include <functional>
#include <span>

#include "nlqwalk/errors.hpp"
#include "nlqwalk/lattice.hpp"

namespace nlqwalk {

using OdeRhs = std::function<void(double t, const ComplexVector& y, ComplexVector& dydt)>;
using SampleCallback = std::function<void(double t, const ComplexVector& y)>;

struct StepControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.01;
  long max_steps = 2'000'000;
};

/// Dormand-Prince 5(4) embedded Runge-Kutta with quartic dense output.
/// Integration direction is the sign of (t_end - t0); both directions work.
/// sample_times must be sorted in the direction of integration and lie within
/// [t0, t_end]; on_sample is invoked once per sample time, states at interior
/// times coming from the dense-output interpolant of the covering step.
/// Returns the state at t_end. Throws StiffnessError when the step size
/// underflows or the step budget runs out.
ComplexVector integrate_dopri5(const OdeRhs& f, double t0, ComplexVector y0,
                               double t_end, const StepControls& ctl,
                               std::span<const double> sample_times,
                               const SampleCallback& on_sample);

/// Classical fixed-step RK4 cross-check. Uses step sizes of at most `step`,
/// shortened where needed to land exactly on each sample time and on t_end.
ComplexVector integrate_rk4(const OdeRhs& f, double t0, ComplexVector y0,
                            double t_end, double step, long max_steps,
                            std::span<const double> sample_times,
                            const SampleCallback& on_sample);

}  // namespace nlqwalk
