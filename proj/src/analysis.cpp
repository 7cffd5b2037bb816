#include "nlqwalk/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace nlqwalk {

void AverageConfig::validate() const {
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw std::invalid_argument("averaging total time must be positive");
  if (samples < 2)
    throw std::invalid_argument("averaging needs at least 2 samples, got " +
                                std::to_string(samples));
}

std::vector<double> average_grid(const AverageConfig& avg) {
  avg.validate();
  const double half = 0.5 * avg.total_time;
  const int m = avg.samples;
  std::vector<double> grid(m);
  for (int j = 0; j < m; ++j)
    grid[j] = half + half * static_cast<double>(j) / static_cast<double>(m - 1);
  grid.back() = avg.total_time;  // exact endpoint
  return grid;
}

double time_averaged_prob(const ObservableSeries& series, int vertex,
                          const AverageConfig& avg) {
  avg.validate();
  if (series.times.empty())
    throw std::invalid_argument("time average: empty series");
  if (vertex < 0 || vertex >= series.probs.front().size())
    throw std::out_of_range("time average: vertex out of range");
  const double tol = 1e-9 * std::max(1.0, avg.total_time);
  if (series.times.back() < avg.total_time - tol)
    throw std::invalid_argument(
        "time average: series ends at t = " + std::to_string(series.times.back()) +
        ", before T = " + std::to_string(avg.total_time));

  const auto grid = average_grid(avg);
  double sum = 0.0;
  for (double tj : grid) {
    auto it = std::lower_bound(series.times.begin(), series.times.end(), tj - tol);
    if (it == series.times.end() || std::abs(*it - tj) > tol)
      throw std::invalid_argument(
          "time average: series has no sample at t = " + std::to_string(tj) +
          "; integrate with the averaging grid in the sample times");
    sum += series.probs[static_cast<std::size_t>(it - series.times.begin())][vertex];
  }
  return sum / static_cast<double>(grid.size());
}

ObservableSeries run_for_average(const Lattice& lat, const WalkParams& params,
                                 int start_vertex, const AverageConfig& avg,
                                 const IntegratorConfig& cfg) {
  auto samples = average_grid(avg);
  samples.insert(samples.begin(), 0.0);
  return evolve_at(lat, params, localized_state(lat.size(), start_vertex),
                   samples, cfg);
}

namespace {

SweepPoint run_sweep_point(const SweepSpec& spec, double g) {
  SweepPoint point;
  point.g = g;
  try {
    const WalkParams params{g, spec.gamma};
    const auto series = run_for_average(spec.lattice, params, spec.start_vertex,
                                        spec.avg, spec.integrator);
    point.p_bar = time_averaged_prob(series, spec.start_vertex, spec.avg);
  } catch (const std::exception& e) {
    point.error = "g = " + std::to_string(g) + ": " + e.what();
  }
  return point;
}

}  // namespace

std::vector<SweepPoint> sweep_g(const SweepSpec& spec) {
  if (spec.g_values.empty())
    throw std::invalid_argument("sweep: empty g list");
  for (double g : spec.g_values)
    if (!std::isfinite(g))
      throw std::invalid_argument("sweep: non-finite g value");
  spec.avg.validate();
  spec.integrator.validate();

  const std::size_t n = spec.g_values.size();
  std::vector<SweepPoint> results(n);
  unsigned workers = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      results[i] = run_sweep_point(spec, spec.g_values[i]);
    return results;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < n;)
      results[i] = run_sweep_point(spec, spec.g_values[i]);
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

std::optional<double> estimate_transition(std::span<const SweepPoint> sweep,
                                          double threshold) {
  double prev_g = 0.0, prev_p = 0.0;
  bool have_prev = false;
  for (const auto& point : sweep) {
    if (!point.ok()) continue;
    if (have_prev && point.g < prev_g)
      throw std::invalid_argument("transition estimate: sweep is not sorted by g");
    const double p = *point.p_bar;
    if (have_prev && prev_p < threshold && p >= threshold) {
      if (p == prev_p) return point.g;
      return prev_g + (threshold - prev_p) * (point.g - prev_g) / (p - prev_p);
    }
    prev_g = point.g;
    prev_p = p;
    have_prev = true;
  }
  return std::nullopt;
}

}  // namespace nlqwalk
