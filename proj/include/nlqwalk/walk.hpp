#pragma once

#include <span>
#include <vector>

#include "nlqwalk/integrator.hpp"
#include "nlqwalk/lattice.hpp"

namespace nlqwalk {

/// Parameters of the nonlinear walk. The amplitudes evolve by
///   d psi_j / dt = i (gamma * sum_k A_jk psi_k + g |psi_j|^2 psi_j),
/// i.e. the cubic nonlinear Schroedinger equation with Hamiltonian
/// H = -gamma A and hbar = 1.
struct WalkParams {
  double g = 0.0;      ///< cubic nonlinearity coefficient; any finite real
  double gamma = 1.0;  ///< jumping rate, must be positive

  void validate() const;
};

struct WalkState {
  double t = 0.0;
  ComplexVector psi;
};

/// |vertex> at t = 0.
WalkState localized_state(int n, int vertex);

enum class StepMethod { AdaptiveRK45, FixedRK4 };

struct IntegratorConfig {
  StepMethod method = StepMethod::AdaptiveRK45;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.01;
  double sample_dt = 0.05;      ///< output sampling interval used by evolve()
  long max_steps = 2'000'000;   ///< step budget before a StiffnessError

  StepControls controls() const {
    return StepControls{rel_tol, abs_tol, max_step, max_steps};
  }
  void validate() const;
};

/// Time series of per-vertex probabilities, total norm, and conserved energy.
/// Rows are ordered strictly in the direction of integration (increasing
/// except in reverse-time diagnostic runs); each norm entry is the exact sum
/// of its probability row. The state is never renormalized, so norm drift
/// measures integration error.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> probs;  ///< |psi_j|^2 per sample
  std::vector<double> norms;
  std::vector<double> energies;
  WalkState final_state;

  std::size_t size() const noexcept { return times.size(); }
};

/// Time derivative of psi. Throws on length mismatch or non-finite input.
ComplexVector rhs(const Lattice& lat, const WalkParams& params,
                  const ComplexVector& psi);

/// Derivative written into `out`, no validation. Stage evaluations inside the
/// integrators go through this.
void rhs_into(const Lattice& lat, const WalkParams& params,
              const ComplexVector& psi, ComplexVector& out);

/// <psi|H|psi> = -gamma <psi|A|psi>.
double hamiltonian_expectation(const Lattice& lat, const ComplexVector& psi,
                               double gamma = 1.0);

/// Conserved Gross-Pitaevskii energy
///   E(psi) = -gamma <psi|A|psi> - (g/2) sum_j |psi_j|^4.
/// Equals -g/2 for a state localized on a single vertex.
double gp_energy(const Lattice& lat, const WalkParams& params,
                 const ComplexVector& psi);

/// Integrates from `initial` to t_end, sampling every cfg.sample_dt; both the
/// start and end times are included in the output grid. `initial.psi` must be
/// unit-normalized within 1e-12. t_end < initial.t integrates in reverse,
/// which exists as an accuracy diagnostic.
ObservableSeries evolve(const Lattice& lat, const WalkParams& params,
                        const WalkState& initial, double t_end,
                        const IntegratorConfig& cfg);

/// Same as evolve() but sampling at the given times (sorted strictly in the
/// integration direction; the last one is the integration end point).
ObservableSeries evolve_at(const Lattice& lat, const WalkParams& params,
                           const WalkState& initial,
                           std::span<const double> sample_times,
                           const IntegratorConfig& cfg);

}  // namespace nlqwalk
