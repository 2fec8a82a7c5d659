#pragma once
// Discrete excursion measures, computed exactly from Green's functions.
//
// For a domain D with killed vertices K, walks start on a vertex b of
// dD + K, take a first step (b, u) into E1 and run until they next hit
// dD + K; the last step must lie in E2. Each start vertex carries the law of
// the walk from it, so a single step has mass 1/6.

#include <iosfwd>
#include <span>
#include <vector>

#include "he/explorer.hpp"
#include "he/harmonic.hpp"

namespace he {

struct EdgeSets {
  // Directed edges from dD + K whose relative interior lies in D.
  std::vector<DirectedEdge> e_out;
  // Their reversals, in the same order.
  std::vector<DirectedEdge> e_in;
};

EdgeSets edge_sets(const LatticeDomain& d, std::span<const Vertex> killed);

struct ExcursionSpec {
  DomainPtr domain;
  std::vector<Vertex> killed;
  std::vector<DirectedEdge> e1;
  std::vector<DirectedEdge> e2;
};

// Spec with E1 = e_out and E2 = e_in.
ExcursionSpec full_spec(DomainPtr d, std::vector<Vertex> killed = {});

double total_mass(const ExcursionSpec& s);

// Expected number of visits to v under the measure; requires E2 = e_in.
double visit_integral(const ExcursionSpec& s, const Vertex& v);

// Mass of the excursions that visit the closed ball around v of radius
// inr_v(D)/2; requires E2 = e_in and inr_v(D) >= 2.
double ball_hit_mass(const ExcursionSpec& s, const Vertex& v);

struct ExcursionSummary {
  double total_mass = 0.0;
  // Per vertex id; zero at vertices that are not free.
  VertexFunction visit_integrals;
};

// Requires E2 = e_in.
ExcursionSummary summarize(const ExcursionSpec& s);

// Edges of e_in(D minus K) whose head is coloured 1 in the explorer state.
std::vector<DirectedEdge> coloured_exit_edges(const ExplorerState& s);

// Edges of e_out(D) leaving the 0-coloured boundary arc.
std::vector<DirectedEdge> minus_arc_edges(const LatticeDomain& d);

struct MartingaleCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

// lhs = |nu_n| for nu_n = nu(D minus V_n, E_minus, E_plus^n); rhs its
// expectation after one more explorer step.
MartingaleCheck nu_martingale_check(const ExplorerState& s, std::span<const DirectedEdge> e_minus,
                                    const SolverConfig& cfg = {});

// Sum over the edges contained in the closed domain of (f(u) - f(v))^2.
double dirichlet_energy(const LatticeDomain& d, const VertexFunction& f);
// (Delta f)(v) = sum over edges [v,u] in the closed domain of f(u) - f(v).
VertexFunction closure_laplacian(const LatticeDomain& d, const VertexFunction& f);

// `quantity,value` rows.
void write_summary_csv(std::ostream& os, const LatticeDomain& d, const ExcursionSummary& s);

}  // namespace he
