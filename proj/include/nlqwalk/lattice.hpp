#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlqwalk {

using ComplexVector = Eigen::VectorXcd;

enum class LatticeKind { Path, Cycle, Custom };

/// One-dimensional lattice: a path P_N (open ends) or a cycle C_N (periodic).
/// Both are stored implicitly as (kind, n); neighbors are computed on the fly,
/// so a lattice costs O(1) memory regardless of size. A Custom variant accepts
/// any symmetric 0/1 adjacency list so the dynamics can be reused on other
/// graphs; only Path and Cycle are constructed by the command-line tools.
///
/// Vertices are labeled 0 .. n-1. Immutable after construction and safe to
/// share across threads.
class Lattice {
 public:
  /// Path of n >= 2 vertices: j adjacent to j+-1, endpoints have degree 1.
  static Lattice path(int n);

  /// Cycle of n >= 3 vertices: every vertex has degree 2, edge between 0 and n-1.
  static Lattice cycle(int n);

  /// Arbitrary graph from adjacency lists. The lists must be symmetric
  /// (u in neighbors[v] iff v in neighbors[u]), with no self-loops and no
  /// repeated entries.
  static Lattice from_adjacency(std::vector<std::vector<int>> neighbors);

  LatticeKind kind() const noexcept { return kind_; }
  int size() const noexcept { return n_; }
  int edge_count() const noexcept;
  int degree(int v) const;
  std::vector<int> neighbors(int v) const;  // sorted

  /// Invokes f(u) once per neighbor u of v.
  template <class F>
  void for_each_neighbor(int v, F&& f) const {
    check_vertex(v);
    switch (kind_) {
      case LatticeKind::Path:
        if (v > 0) f(v - 1);
        if (v + 1 < n_) f(v + 1);
        break;
      case LatticeKind::Cycle:
        f(v == 0 ? n_ - 1 : v - 1);
        f(v + 1 == n_ ? 0 : v + 1);
        break;
      case LatticeKind::Custom:
        for (int u : adjacency_[v]) f(u);
        break;
    }
  }

 private:
  Lattice(LatticeKind kind, int n) : kind_(kind), n_(n) {}
  void check_vertex(int v) const {
    if (v < 0 || v >= n_)
      throw std::out_of_range("vertex index " + std::to_string(v) +
                              " out of range [0, " + std::to_string(n_) + ")");
  }

  LatticeKind kind_;
  int n_;
  std::vector<std::vector<int>> adjacency_;  // Custom only
};

/// (A psi)_j = sum_k A_jk psi_k, touching only the neighbors of each vertex;
/// no dense matrix is formed. Throws std::invalid_argument on length mismatch.
ComplexVector apply_adjacency(const Lattice& lat, const ComplexVector& psi);

/// <psi|A|psi>. Evaluated as a sum of 2 Re(conj(psi_j) psi_k) over edges, so
/// the result is exactly real.
double adjacency_quadratic_form(const Lattice& lat, const ComplexVector& psi);

}  // namespace nlqwalk
