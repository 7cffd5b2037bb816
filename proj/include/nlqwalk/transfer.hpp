#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlqwalk/errors.hpp"
#include "nlqwalk/walk.hpp"

namespace nlqwalk {

/// One constant-g interval of a piecewise control schedule.
struct ScheduleSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double g = 0.0;
};

/// Piecewise-constant g(t) tiling [0, T] with no gaps or overlaps. Each
/// segment owns [t_start, t_end); the last one also owns its end point, so
/// g(t) is right-continuous at switch times.
class GSchedule {
 public:
  /// Validates the tiling. Boundary mismatches up to 1e-12 * max(1, T) are
  /// snapped so consecutive segments share their boundary bitwise; anything
  /// larger throws ScheduleError, as do segments shorter than that
  /// resolution, a first segment not starting at 0, and non-finite values.
  explicit GSchedule(std::vector<ScheduleSegment> segments);

  const std::vector<ScheduleSegment>& segments() const noexcept {
    return segments_;
  }
  double total_time() const noexcept { return segments_.back().t_end; }

  double g_at(double t) const;  ///< throws std::out_of_range outside [0, T]

 private:
  std::vector<ScheduleSegment> segments_;
};

/// Evolves `initial` through the whole schedule with gamma = 1, carrying the
/// state across switch times unchanged; only g jumps. Samples lie on the
/// uniform cfg.sample_dt grid merged with every switch time. The energy
/// column jumps at switches because E depends on g explicitly; the row at a
/// switch time uses the g of the segment starting there, matching g_at.
/// `initial.t` must equal the schedule start (t = 0).
ObservableSeries run_schedule(const Lattice& lat, const GSchedule& schedule,
                              const WalkState& initial,
                              const IntegratorConfig& cfg);

/// Outcome of the trap / release / re-trap protocol.
struct TransferReport {
  int source = 0;
  int target = 0;
  double g_trap = 0.0;
  double hold_in = 0.0;
  double transfer_time = 0.0;
  double hold_out = 0.0;

  double hold_fidelity_source = 0.0;  ///< min p_source over the first trap phase
  double transfer_fidelity = 0.0;     ///< p_target at the moment trapping resumes
  double hold_fidelity_target = 0.0;  ///< min p_target over the final trap phase

  double f_min = 0.0;            ///< trapping-bound minimum at deg(source)
  bool bound_guarantee = false;  ///< g_trap exceeds f_min
  std::optional<double> p_plus;  ///< guaranteed trapped probability, if any
  bool validated_protocol = false;  ///< 3-vertex path, endpoint source/target
  std::vector<std::string> warnings;
};

/// Runs the three-segment schedule (g_trap, 0, g_trap) from |source> and
/// extracts the per-phase fidelities. transfer_time defaults to pi/sqrt(2),
/// the perfect-transfer time between the endpoints of a 3-vertex path. Other
/// lattices or vertex pairs run fine but are reported with
/// validated_protocol = false and a warning: nothing guarantees transfer
/// there, and the trapped probability during re-trapping carries no analytic
/// guarantee anywhere (the bound assumes a fully localized start). If
/// series_out is non-null the full observable series is stored there.
TransferReport timed_transfer(const Lattice& lat, int source, int target,
                              double hold_in,
                              std::optional<double> transfer_time,
                              double hold_out, double g_trap,
                              const IntegratorConfig& cfg,
                              ObservableSeries* series_out = nullptr);

}  // namespace nlqwalk
