#pragma once
// Brute-force walk summation on small domains, used to cross-check the
// Green's function based excursion and harmonic-measure code.
//
// The fundamental matrix N = sum_k Q^k of the absorbing chain is accumulated
// term by term from the one-step transfer matrix Q on the free vertices, with
// no use of the Laplacian solvers.

#include <span>
#include <vector>

#include "he/lattice.hpp"

namespace he {

class WalkOracle {
 public:
  // At most max_free free vertices are accepted.
  WalkOracle(const LatticeDomain& d, std::span<const Vertex> killed, std::size_t max_free = 12);

  std::size_t free_count() const { return free_.size(); }
  // Expected visits to w of a walk started at v (both free).
  double visits(const Vertex& v, const Vertex& w) const;

  double harmonic_measure(const Vertex& v, std::span<const DirectedEdge> edges) const;
  double total_mass(std::span<const DirectedEdge> e1, std::span<const DirectedEdge> e2) const;
  double visit_integral(std::span<const DirectedEdge> e1, const Vertex& v) const;

 private:
  int index(const Vertex& v) const;
  // Probability that a walk from free vertex i leaves through an edge of the
  // list.
  double exit_probability(int i, std::span<const DirectedEdge> edges) const;

  const LatticeDomain* domain_;
  std::vector<Vertex> free_;
  std::vector<std::uint8_t> absorbing_;  // by vertex id
  std::vector<double> n_;                // row-major free x free
};

}  // namespace he
