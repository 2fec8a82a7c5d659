#pragma once
// Discrete harmonic extension, Green's functions and harmonic measure on
// lattice domains.
//
// The Dirichlet problem on the free vertices F is
//   6 h(v) - sum_{u ~ v, u in F} h(u) = sum_{u ~ v, u fixed} h(u),   v in F,
// a symmetric positive definite system. Random-walk Green's functions
// (expected visit counts) are 6 times its inverse.

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "he/lattice.hpp"

namespace he {

enum class SolverMethod { DirectSparse, ConjugateGradient, GaussSeidel, MonteCarlo };

struct SolverConfig {
  SolverMethod method = SolverMethod::ConjugateGradient;
  // Bound on the mean-value defect |h(v) - mean of neighbours| at free
  // vertices. Iterative methods tighten it by the domain's squared radius so
  // that the solution error, not only the defect, stays near this level.
  double tolerance = 1e-10;
  int max_iterations = 200000;
  bool warm_start = true;
  // Walks per free vertex for the Monte Carlo method.
  int mc_walks = 1000;
  std::uint64_t mc_seed = 0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

using DomainPtr = std::shared_ptr<const LatticeDomain>;
using FixedValues = std::vector<std::pair<Vertex, double>>;

// Values on every vertex of the closed domain, indexed by vertex id.
using VertexFunction = std::vector<double>;

// Solution of a Dirichlet problem; an immutable value.
class HarmonicField {
 public:
  HarmonicField(DomainPtr domain, std::vector<std::uint8_t> fixed, VertexFunction values)
      : domain_(std::move(domain)), fixed_(std::move(fixed)), values_(std::move(values)) {}

  const LatticeDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }

  double value(int id) const { return values_[static_cast<std::size_t>(id)]; }
  double value(const Vertex& v) const;
  bool is_fixed(int id) const { return fixed_[static_cast<std::size_t>(id)] != 0; }
  const VertexFunction& values() const { return values_; }
  const std::vector<std::uint8_t>& fixed_mask() const { return fixed_; }
  std::size_t free_count() const;

  // max over free vertices of |h(v) - mean of its six neighbours|
  double mean_value_defect() const;

 private:
  DomainPtr domain_;
  std::vector<std::uint8_t> fixed_;
  VertexFunction values_;
};

// Extension of `fixed` (which must cover every boundary vertex).
HarmonicField harmonic_extension(DomainPtr d, const FixedValues& fixed, const SolverConfig& cfg = {});

// Same, with the fixed set given as an id mask and values read from
// `values` at the masked ids.
HarmonicField harmonic_extension(DomainPtr d, std::vector<std::uint8_t> fixed_mask, VertexFunction values,
                                 const SolverConfig& cfg = {}, const VertexFunction* initial_guess = nullptr);

// Adds v to the fixed set. With cfg.warm_start the previous solution seeds
// the iterative solve.
HarmonicField refix(const HarmonicField& field, const Vertex& v, double value, const SolverConfig& cfg = {});

// Boolean id mask for a vertex list (vertices outside the domain rejected).
std::vector<std::uint8_t> vertex_mask(const LatticeDomain& d, std::span<const Vertex> vs);

// Absorbing set of D minus `killed`: boundary plus killed vertices.
std::vector<std::uint8_t> absorbing_mask(const LatticeDomain& d, std::span<const Vertex> killed);

// Expected number of visits to each vertex (counting time 0) of a simple
// random walk from v before it hits boundary or killed vertices.
VertexFunction green(const LatticeDomain& d, std::span<const Vertex> killed, const Vertex& v);

// Directed edges (x, w) from a free vertex into the absorbing set.
std::vector<DirectedEdge> exit_edges(const LatticeDomain& d, std::span<const Vertex> killed);

// Probability that a walk from v first leaves D minus killed through an edge
// of `edges`.
double harmonic_measure_edges(const LatticeDomain& d, std::span<const Vertex> killed, const Vertex& v,
                              std::span<const DirectedEdge> edges);

struct McEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::int64_t walks = 0;
};

// Monte Carlo estimate of harmonic_measure_edges.
McEstimate mc_hit_estimate(const LatticeDomain& d, std::span<const Vertex> killed, const Vertex& v,
                           std::span<const DirectedEdge> edges, std::int64_t n_walks, std::uint64_t seed);

// Sparse Cholesky factorisation of the Laplacian on the vertices left free
// by an absorbing mask. Shared read-only by concurrent callers.
class DirichletFactorization {
 public:
  DirichletFactorization(const LatticeDomain& d, const std::vector<std::uint8_t>& absorbing);
  ~DirichletFactorization();
  DirichletFactorization(const DirichletFactorization&) = delete;
  DirichletFactorization& operator=(const DirichletFactorization&) = delete;

  std::size_t free_count() const { return free_.size(); }
  // Free-vertex index of an id, or -1.
  int local_index(int id) const { return local_[static_cast<std::size_t>(id)]; }
  int id_of_local(std::size_t i) const { return free_[i]; }

  // Solves L x = rhs over the free vertices (both in free-vertex order).
  std::vector<double> solve(const std::vector<double>& rhs) const;
  // Random-walk Green's function column (expected visits) from a free vertex,
  // over free-vertex order.
  std::vector<double> green_column(int id) const;
  // Harmonic function with the given values on the absorbing set, over all
  // vertex ids.
  VertexFunction extend(const VertexFunction& absorbing_values) const;

 private:
  struct Impl;
  const LatticeDomain* domain_;
  std::vector<std::uint8_t> absorbing_;
  std::vector<int> free_;
  std::vector<int> local_;
  std::unique_ptr<Impl> impl_;
};

// HEFIELD 1 diagnostic dump: "a b value" per vertex.
void write_field(std::ostream& os, const HarmonicField& f);

}  // namespace he
