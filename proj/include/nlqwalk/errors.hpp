#pragma once

#include <stdexcept>
#include <string>

namespace nlqwalk {

/// Adaptive time stepping gave up: the step size underflowed or the step
/// budget was exhausted before reaching the requested end time.
class StiffnessError : public std::runtime_error {
 public:
  StiffnessError(const std::string& what, double t_fail)
      : std::runtime_error(what), t_fail_(t_fail) {}

  double time_of_failure() const noexcept { return t_fail_; }

 private:
  double t_fail_;
};

/// Invalid piecewise-constant schedule (gap, overlap, empty or degenerate
/// segment, wrong start time).
class ScheduleError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace nlqwalk
