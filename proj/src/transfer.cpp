#include "nlqwalk/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlqwalk/bounds.hpp"
#include "nlqwalk/integrator.hpp"

namespace nlqwalk {

namespace {

double snap_tol(double total_time) {
  return 1e-12 * std::max(1.0, total_time);
}

std::string fmt(double x) { return std::to_string(x); }

// Uniform sample_dt grid over [0, T] merged with every switch time; when a
// uniform point lands within the snap tolerance of a switch, the switch time
// wins so segment slicing can compare times bitwise.
std::vector<double> build_grid(const GSchedule& schedule, double sample_dt) {
  const double total = schedule.total_time();
  const double snap = snap_tol(total);

  std::vector<double> switches;
  switches.reserve(schedule.segments().size() + 1);
  for (const auto& seg : schedule.segments()) switches.push_back(seg.t_start);
  switches.push_back(total);

  const auto count =
      static_cast<std::size_t>(std::floor(total / sample_dt + 1e-9));
  std::vector<double> grid;
  grid.reserve(count + switches.size() + 1);
  std::size_t si = 0;
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = static_cast<double>(i) * sample_dt;
    while (si < switches.size() && switches[si] < t - snap)
      grid.push_back(switches[si++]);
    if (si < switches.size() && std::abs(switches[si] - t) <= snap)
      grid.push_back(switches[si++]);
    else
      grid.push_back(t);
  }
  while (si < switches.size()) grid.push_back(switches[si++]);
  return grid;
}

}  // namespace

GSchedule::GSchedule(std::vector<ScheduleSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw ScheduleError("schedule has no segments");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.t_start) || !std::isfinite(s.t_end) ||
        !std::isfinite(s.g))
      throw ScheduleError("segment " + std::to_string(i) +
                          " has a non-finite field");
    if (!(s.t_end > s.t_start))
      throw ScheduleError("segment " + std::to_string(i) +
                          " has non-positive duration (t_start = " +
                          fmt(s.t_start) + ", t_end = " + fmt(s.t_end) + ")");
  }
  const double snap = snap_tol(segments_.back().t_end);
  if (std::abs(segments_.front().t_start) > snap)
    throw ScheduleError("schedule must start at t = 0, first segment starts at t = " +
                        fmt(segments_.front().t_start));
  segments_.front().t_start = 0.0;
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    const double step = segments_[i + 1].t_start - segments_[i].t_end;
    if (step > snap)
      throw ScheduleError("gap in schedule between t = " +
                          fmt(segments_[i].t_end) + " and t = " +
                          fmt(segments_[i + 1].t_start) + " (segments " +
                          std::to_string(i) + " and " + std::to_string(i + 1) +
                          ")");
    if (step < -snap)
      throw ScheduleError("segments " + std::to_string(i) + " and " +
                          std::to_string(i + 1) + " overlap between t = " +
                          fmt(segments_[i + 1].t_start) + " and t = " +
                          fmt(segments_[i].t_end));
    segments_[i + 1].t_start = segments_[i].t_end;
  }
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (!(segments_[i].t_end - segments_[i].t_start > snap))
      throw ScheduleError("segment " + std::to_string(i) +
                          " is shorter than the schedule time resolution");
}

double GSchedule::g_at(double t) const {
  const double total = total_time();
  const double snap = snap_tol(total);
  if (!(t >= -snap) || !(t <= total + snap))
    throw std::out_of_range("t = " + fmt(t) + " is outside the schedule [0, " +
                            fmt(total) + "]");
  t = std::clamp(t, 0.0, total);
  if (t >= segments_.back().t_start) return segments_.back().g;
  const auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double v, const ScheduleSegment& s) { return v < s.t_start; });
  return std::prev(it)->g;
}

ObservableSeries run_schedule(const Lattice& lat, const GSchedule& schedule,
                              const WalkState& initial,
                              const IntegratorConfig& cfg) {
  cfg.validate();
  if (initial.psi.size() != lat.size())
    throw std::invalid_argument("schedule run: vector length " +
                                std::to_string(initial.psi.size()) +
                                " does not match lattice size " +
                                std::to_string(lat.size()));
  const double total = schedule.total_time();
  if (std::abs(initial.t) > snap_tol(total))
    throw std::invalid_argument(
        "schedule run: initial state must sit at the schedule start t = 0, got t = " +
        fmt(initial.t));
  const double norm_dev = std::abs(initial.psi.norm() - 1.0);
  if (!(norm_dev <= 1e-12))
    throw std::invalid_argument(
        "schedule run: initial state is not unit-normalized (|norm - 1| = " +
        std::to_string(norm_dev) + ")");

  const auto grid = build_grid(schedule, cfg.sample_dt);

  ObservableSeries series;
  series.times.reserve(grid.size());
  series.probs.reserve(grid.size());
  series.norms.reserve(grid.size());
  series.energies.reserve(grid.size());

  ComplexVector psi = initial.psi;
  std::size_t lo = 0;  // grid index of the running segment's start time
  for (std::size_t si = 0; si < schedule.segments().size(); ++si) {
    const auto& seg = schedule.segments()[si];
    const bool last = si + 1 == schedule.segments().size();
    std::size_t hi = lo;
    while (grid[hi] != seg.t_end) ++hi;  // switch times are grid entries bitwise

    const WalkParams params{seg.g, 1.0};
    auto record = [&](double t, const ComplexVector& y) {
      Eigen::VectorXd row = y.cwiseAbs2();
      series.times.push_back(t);
      series.norms.push_back(row.sum());
      series.energies.push_back(hamiltonian_expectation(lat, y, params.gamma) -
                                0.5 * params.g * row.squaredNorm());
      series.probs.push_back(std::move(row));
    };
    auto f = [&](double, const ComplexVector& y, ComplexVector& dydt) {
      rhs_into(lat, params, y, dydt);
    };
    // A segment records [t_start, t_end); the row at t_end belongs to the
    // next segment, whose g sets the energy there. The last segment keeps
    // its end row.
    std::span<const double> samples(grid.data() + lo, (last ? hi + 1 : hi) - lo);
    if (cfg.method == StepMethod::AdaptiveRK45)
      psi = integrate_dopri5(f, seg.t_start, std::move(psi), seg.t_end,
                             cfg.controls(), samples, record);
    else
      psi = integrate_rk4(f, seg.t_start, std::move(psi), seg.t_end,
                          cfg.max_step, cfg.max_steps, samples, record);
    lo = hi;
  }
  series.final_state = WalkState{total, std::move(psi)};
  return series;
}

TransferReport timed_transfer(const Lattice& lat, int source, int target,
                              double hold_in,
                              std::optional<double> transfer_time,
                              double hold_out, double g_trap,
                              const IntegratorConfig& cfg,
                              ObservableSeries* series_out) {
  const int deg_source = lat.degree(source);  // also range-checks the vertex
  lat.degree(target);
  if (source == target)
    throw std::invalid_argument(
        "transfer protocol needs distinct source and target vertices");
  const double t_transfer =
      transfer_time.value_or(std::numbers::pi / std::numbers::sqrt2);
  for (auto [value, name] :
       {std::pair{hold_in, "hold_in"}, std::pair{t_transfer, "transfer_time"},
        std::pair{hold_out, "hold_out"}})
    if (!std::isfinite(value) || !(value > 0.0))
      throw std::invalid_argument(std::string(name) +
                                  " must be a positive duration, got " +
                                  fmt(value));
  if (!std::isfinite(g_trap))
    throw std::invalid_argument("g_trap must be finite");

  TransferReport report;
  report.source = source;
  report.target = target;
  report.g_trap = g_trap;
  report.hold_in = hold_in;
  report.transfer_time = t_transfer;
  report.hold_out = hold_out;

  report.validated_protocol =
      lat.kind() == LatticeKind::Path && lat.size() == 3 &&
      ((source == 0 && target == 2) || (source == 2 && target == 0));
  if (!report.validated_protocol)
    report.warnings.push_back(
        "protocol is demonstrated only on the 3-vertex path between its "
        "endpoints; fidelities for this configuration are unvalidated");

  const auto minimum = minimize_bound(deg_source);
  report.f_min = minimum.f_min;
  if (std::abs(g_trap) > minimum.f_min) {
    report.bound_guarantee = true;
    report.p_plus = trap_roots(deg_source, std::abs(g_trap)).p_plus;
  } else {
    report.warnings.push_back(
        "|g_trap| = " + fmt(std::abs(g_trap)) +
        " does not exceed the trapping-bound minimum " + fmt(minimum.f_min) +
        " for degree " + std::to_string(deg_source) +
        "; no trapping guarantee applies");
  }

  const double t_release = hold_in;
  const double t_retrap = t_release + t_transfer;
  const double t_final = t_retrap + hold_out;
  const GSchedule schedule({{0.0, t_release, g_trap},
                            {t_release, t_retrap, 0.0},
                            {t_retrap, t_final, g_trap}});
  auto series = run_schedule(lat, schedule, localized_state(lat.size(), source),
                             cfg);

  double min_source = std::numeric_limits<double>::infinity();
  double min_target = std::numeric_limits<double>::infinity();
  double at_retrap = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    if (t <= t_release) min_source = std::min(min_source, series.probs[i][source]);
    if (t == t_retrap) at_retrap = series.probs[i][target];
    if (t >= t_retrap) min_target = std::min(min_target, series.probs[i][target]);
  }
  report.hold_fidelity_source = min_source;
  report.transfer_fidelity = at_retrap;
  report.hold_fidelity_target = min_target;

  if (series_out) *series_out = std::move(series);
  return report;
}

}  // namespace nlqwalk
