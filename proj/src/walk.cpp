#include "nlqwalk/walk.hpp"

#include <cmath>

namespace nlqwalk {

void rhs_into(const Lattice& lat, const WalkParams& params,
              const ComplexVector& psi, ComplexVector& out) {
  const int n = lat.size();
  out.resize(n);
  for (int v = 0; v < n; ++v) {
    std::complex<double> hop(0.0, 0.0);
    lat.for_each_neighbor(v, [&](int u) { hop += psi[u]; });
    const std::complex<double> total =
        params.gamma * hop + params.g * std::norm(psi[v]) * psi[v];
    out[v] = std::complex<double>(-total.imag(), total.real());  // i * total
  }
}

namespace {

void check_dimension(const Lattice& lat, const ComplexVector& psi,
                     const char* where) {
  if (psi.size() != lat.size())
    throw std::invalid_argument(std::string(where) + ": vector length " +
                                std::to_string(psi.size()) +
                                " does not match lattice size " +
                                std::to_string(lat.size()));
}

}  // namespace

void WalkParams::validate() const {
  if (!std::isfinite(g))
    throw std::invalid_argument("nonlinearity coefficient g must be finite");
  if (!std::isfinite(gamma) || gamma <= 0.0)
    throw std::invalid_argument("jumping rate gamma must be positive");
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("integrator tolerances must be positive");
  if (!(max_step > 0.0))
    throw std::invalid_argument("max_step must be positive");
  if (!(sample_dt > 0.0))
    throw std::invalid_argument("sample_dt must be positive");
  if (max_steps <= 0)
    throw std::invalid_argument("max_steps must be positive");
}

WalkState localized_state(int n, int vertex) {
  if (n < 1) throw std::invalid_argument("state dimension must be positive");
  if (vertex < 0 || vertex >= n)
    throw std::out_of_range("start vertex " + std::to_string(vertex) +
                            " out of range [0, " + std::to_string(n) + ")");
  WalkState s;
  s.t = 0.0;
  s.psi = ComplexVector::Zero(n);
  s.psi[vertex] = 1.0;
  return s;
}

ComplexVector rhs(const Lattice& lat, const WalkParams& params,
                  const ComplexVector& psi) {
  params.validate();
  check_dimension(lat, psi, "rhs");
  for (Eigen::Index j = 0; j < psi.size(); ++j)
    if (!std::isfinite(psi[j].real()) || !std::isfinite(psi[j].imag()))
      throw std::invalid_argument("rhs: non-finite amplitude at vertex " +
                                  std::to_string(j));
  ComplexVector out;
  rhs_into(lat, params, psi, out);
  return out;
}

double hamiltonian_expectation(const Lattice& lat, const ComplexVector& psi,
                               double gamma) {
  check_dimension(lat, psi, "hamiltonian_expectation");
  return -gamma * adjacency_quadratic_form(lat, psi);
}

double gp_energy(const Lattice& lat, const WalkParams& params,
                 const ComplexVector& psi) {
  check_dimension(lat, psi, "gp_energy");
  double quartic = 0.0;
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    const double p = std::norm(psi[j]);
    quartic += p * p;
  }
  return hamiltonian_expectation(lat, psi, params.gamma) -
         0.5 * params.g * quartic;
}

ObservableSeries evolve_at(const Lattice& lat, const WalkParams& params,
                           const WalkState& initial,
                           std::span<const double> sample_times,
                           const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  check_dimension(lat, initial.psi, "evolve");
  if (sample_times.empty())
    throw std::invalid_argument("evolve: no sample times given");
  const double norm_dev = std::abs(initial.psi.norm() - 1.0);
  if (!(norm_dev <= 1e-12))
    throw std::invalid_argument(
        "evolve: initial state is not unit-normalized (|norm - 1| = " +
        std::to_string(norm_dev) + ")");
  const double t_end = sample_times.back();
  if (t_end == initial.t)
    throw std::invalid_argument("evolve: t_end must differ from the start time");

  ObservableSeries series;
  series.times.reserve(sample_times.size());
  series.probs.reserve(sample_times.size());
  series.norms.reserve(sample_times.size());
  series.energies.reserve(sample_times.size());

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

  ComplexVector final_psi;
  if (cfg.method == StepMethod::AdaptiveRK45) {
    final_psi = integrate_dopri5(f, initial.t, initial.psi, t_end,
                                 cfg.controls(), sample_times, record);
  } else {
    final_psi = integrate_rk4(f, initial.t, initial.psi, t_end, cfg.max_step,
                              cfg.max_steps, sample_times, record);
  }
  series.final_state = WalkState{t_end, std::move(final_psi)};
  return series;
}

ObservableSeries evolve(const Lattice& lat, const WalkParams& params,
                        const WalkState& initial, double t_end,
                        const IntegratorConfig& cfg) {
  cfg.validate();
  if (t_end == initial.t)
    throw std::invalid_argument("evolve: t_end must differ from the start time");
  const double span = t_end - initial.t;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double snap = 1e-12 * std::max(1.0, std::abs(t_end));
  std::vector<double> grid;
  const auto count =
      static_cast<std::size_t>(std::floor(std::abs(span) / cfg.sample_dt + 1e-9));
  grid.reserve(count + 2);
  for (std::size_t i = 0; i <= count; ++i) {
    double t = initial.t + dir * static_cast<double>(i) * cfg.sample_dt;
    if (std::abs(t - t_end) <= snap) t = t_end;
    if (!grid.empty() && t == grid.back()) continue;
    grid.push_back(t);
  }
  if (grid.back() != t_end) grid.push_back(t_end);
  return evolve_at(lat, params, initial, grid, cfg);
}

}  // namespace nlqwalk
