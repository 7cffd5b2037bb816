#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlqwalk/walk.hpp"

namespace nlqwalk {

/// Configuration of the discrete time-averaged probability estimate: the mean
/// of |psi_r(t)|^2 over `samples` uniformly spaced times in [T/2, T]. Only the
/// latter half of the run is averaged so the initial transient does not skew
/// the estimate.
struct AverageConfig {
  double total_time = 300.0;  ///< T; the averaging window is [T/2, T]
  int samples = 400;          ///< M, number of uniform sample points, >= 2

  void validate() const;
};

/// The M sample times T/2 + (j-1) * (T/2) / (M-1), j = 1..M; both window
/// endpoints are included.
std::vector<double> average_grid(const AverageConfig& avg);

/// Mean of probs[vertex] over the averaging grid. The series must contain a
/// sample at every grid time (the runner below integrates with the grid merged
/// into its sample times, so each value comes from the integrator's dense
/// output rather than nearest-sample interpolation); a series that does not
/// cover [0, T] or misses a grid point raises std::invalid_argument.
double time_averaged_prob(const ObservableSeries& series, int vertex,
                          const AverageConfig& avg);

/// Evolves |start_vertex> to T with the averaging grid in the sample times.
ObservableSeries run_for_average(const Lattice& lat, const WalkParams& params,
                                 int start_vertex, const AverageConfig& avg,
                                 const IntegratorConfig& cfg);

struct SweepSpec {
  std::vector<double> g_values;
  Lattice lattice;
  int start_vertex = 0;
  double gamma = 1.0;
  AverageConfig avg;
  IntegratorConfig integrator;
  int jobs = 0;  ///< worker threads; <= 0 means hardware concurrency
};

struct SweepPoint {
  double g = 0.0;
  std::optional<double> p_bar;
  std::string error;  ///< set when p_bar is absent

  bool ok() const noexcept { return p_bar.has_value(); }
};

/// One evolve + average per g value. Points run independently on a small
/// worker pool; results keep the input order and are bitwise independent of
/// the thread count. A failing point records its error (with the offending g)
/// and the remaining points still run.
std::vector<SweepPoint> sweep_g(const SweepSpec& spec);

/// Linear interpolation of the first upward crossing of p_bar through
/// `threshold` in a sweep sorted by g. Failed points are skipped. Returns
/// nullopt when no crossing exists.
std::optional<double> estimate_transition(std::span<const SweepPoint> sweep,
                                          double threshold = 0.5);

}  // namespace nlqwalk
