#pragma once
// Incremental Dirichlet solves for the explorer.
//
// With V_fixed = boundary + P, the harmonic extension of data c on P is
//   h(v) = h0(v) + G(v,P) G(P,P)^{-1} (c - h0(P)),
// where h0 is the extension of the boundary data alone and G the Green's
// function of the full domain. A growing Cholesky factor of G(P,P) makes each
// explorer step O(|P|^2) instead of a full solve.

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "he/harmonic.hpp"

namespace he {

// Lazily computed Green's function columns of a domain (absorbing set = its
// boundary), shared read-only between samplers. Columns of vertices inside
// the window are cached, restricted to window rows; other columns are
// computed on request and owned by the caller.
class GreenCache {
 public:
  // window_radius: Euclidean radius around v_start of the cached window;
  // a non-positive value caches every interior vertex.
  explicit GreenCache(DomainPtr d, double window_radius = 0.0);

  const LatticeDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  // Harmonic extension of the boundary colouring h0.
  const VertexFunction& h0() const { return h0_; }

  // Window index of an interior vertex id, or -1.
  int window_index(int id) const { return window_index_[static_cast<std::size_t>(id)]; }
  std::size_t window_size() const { return window_.size(); }

  // Column G(., id) over window rows; id must be in the window. Thread-safe.
  const std::vector<double>& window_column(int id) const;
  // Column G(., id) over all interior ids.
  std::vector<double> full_column(int id) const;

 private:
  DomainPtr domain_;
  std::unique_ptr<DirichletFactorization> factor_;
  VertexFunction h0_;
  std::vector<int> window_;
  std::vector<int> window_index_;
  mutable std::vector<std::vector<double>> columns_;
  mutable std::unique_ptr<std::once_flag[]> once_;
};

// Harmonic extension of boundary data plus a growing set of fixed interior
// vertices. Single-threaded; one per sample.
class CapacitanceSolver {
 public:
  explicit CapacitanceSolver(const GreenCache& cache);

  // h(id) for the current fixed set; id must be interior.
  double value(int id);
  // Fixes an interior vertex that is not yet fixed.
  void fix(int id, double c);
  std::size_t fixed_count() const { return fixed_.size(); }

 private:
  // G(id, fixed_[j]) for all j, plus G(id, id).
  void green_row(int id);

  const GreenCache& cache_;
  std::vector<int> fixed_;
  std::vector<double> factor_;  // packed rows of the lower Cholesky factor
  std::vector<double> y_;
  std::unordered_map<int, std::vector<double>> outside_;
  std::vector<double> row_;
  std::vector<double> z_;
  double diag_ = 0.0;
  int z_for_ = -1;
};

}  // namespace he
