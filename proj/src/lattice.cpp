#include "nlqwalk/lattice.hpp"

#include <algorithm>
#include <numeric>

namespace nlqwalk {

Lattice Lattice::path(int n) {
  if (n < 2)
    throw std::invalid_argument("path requires at least 2 vertices, got " +
                                std::to_string(n));
  return Lattice(LatticeKind::Path, n);
}

Lattice Lattice::cycle(int n) {
  if (n < 3)
    throw std::invalid_argument("cycle requires at least 3 vertices, got " +
                                std::to_string(n));
  return Lattice(LatticeKind::Cycle, n);
}

Lattice Lattice::from_adjacency(std::vector<std::vector<int>> neighbors) {
  const int n = static_cast<int>(neighbors.size());
  if (n < 1) throw std::invalid_argument("adjacency list is empty");
  for (int v = 0; v < n; ++v) {
    std::vector<int> seen;
    for (int u : neighbors[v]) {
      if (u < 0 || u >= n)
        throw std::invalid_argument("neighbor index out of range: " +
                                    std::to_string(u));
      if (u == v)
        throw std::invalid_argument("self-loop at vertex " + std::to_string(v));
      if (std::find(seen.begin(), seen.end(), u) != seen.end())
        throw std::invalid_argument("duplicate edge (" + std::to_string(v) +
                                    ", " + std::to_string(u) + ")");
      seen.push_back(u);
      const auto& back = neighbors[u];
      if (std::find(back.begin(), back.end(), v) == back.end())
        throw std::invalid_argument("adjacency not symmetric at edge (" +
                                    std::to_string(v) + ", " +
                                    std::to_string(u) + ")");
    }
  }
  Lattice lat(LatticeKind::Custom, n);
  lat.adjacency_ = std::move(neighbors);
  for (auto& list : lat.adjacency_) std::sort(list.begin(), list.end());
  return lat;
}

int Lattice::edge_count() const noexcept {
  switch (kind_) {
    case LatticeKind::Path:
      return n_ - 1;
    case LatticeKind::Cycle:
      return n_;
    case LatticeKind::Custom: {
      std::size_t total = 0;
      for (const auto& list : adjacency_) total += list.size();
      return static_cast<int>(total / 2);
    }
  }
  return 0;
}

int Lattice::degree(int v) const {
  check_vertex(v);
  switch (kind_) {
    case LatticeKind::Path:
      return (v == 0 || v == n_ - 1) ? 1 : 2;
    case LatticeKind::Cycle:
      return 2;
    case LatticeKind::Custom:
      return static_cast<int>(adjacency_[v].size());
  }
  return 0;
}

std::vector<int> Lattice::neighbors(int v) const {
  std::vector<int> out;
  for_each_neighbor(v, [&](int u) { out.push_back(u); });
  std::sort(out.begin(), out.end());
  return out;
}

ComplexVector apply_adjacency(const Lattice& lat, const ComplexVector& psi) {
  if (psi.size() != lat.size())
    throw std::invalid_argument(
        "apply_adjacency: vector length " + std::to_string(psi.size()) +
        " does not match lattice size " + std::to_string(lat.size()));
  ComplexVector out(lat.size());
  for (int v = 0; v < lat.size(); ++v) {
    std::complex<double> acc(0.0, 0.0);
    lat.for_each_neighbor(v, [&](int u) { acc += psi[u]; });
    out[v] = acc;
  }
  return out;
}

double adjacency_quadratic_form(const Lattice& lat, const ComplexVector& psi) {
  if (psi.size() != lat.size())
    throw std::invalid_argument(
        "adjacency_quadratic_form: vector length " + std::to_string(psi.size()) +
        " does not match lattice size " + std::to_string(lat.size()));
  double acc = 0.0;
  for (int v = 0; v < lat.size(); ++v) {
    lat.for_each_neighbor(v, [&](int u) {
      if (u > v) acc += 2.0 * std::real(std::conj(psi[v]) * psi[u]);
    });
  }
  return acc;
}

}  // namespace nlqwalk
