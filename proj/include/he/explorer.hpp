#pragma once
// The harmonic explorer and the percolation exploration process in the
// dual (triangular lattice) formulation.
//
// The walk keeps the current edge as an ordered pair (zero, one): the next
// triangle lies to its left, `zero` carries colour 0 and `one` colour 1. The
// triangle's third vertex v is coloured 1 with probability p; the path then
// leaves through edge [zero, v] (a right turn), otherwise through [v, one].

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "he/green.hpp"
#include "he/harmonic.hpp"
#include "he/lattice.hpp"

namespace he {

struct StepRecord {
  Vertex v_next;
  double p = 0.0;
  double x = 0.0;
  bool already_fixed = false;
  // x <= p: the walk continues through the edge [zero, v_next].
  bool chose_double_prime = false;
};

// Geometry of the exploration path, independent of how colours are drawn.
class ExplorerWalk {
 public:
  explicit ExplorerWalk(const LatticeDomain& d);

  std::size_t steps() const { return steps_; }
  bool terminated() const { return terminated_; }
  // Third vertex of the next triangle.
  Vertex next_vertex() const;
  Triangle next_triangle() const;
  // Consumes the next triangle with the given colour of next_vertex().
  void advance(bool black);

  EdgeMidpoint current_mid() const { return EdgeMidpoint(zero_, one_); }
  const std::optional<EdgeMidpoint>& previous_mid() const { return previous_; }
  const Vertex& zero_side() const { return zero_; }
  const Vertex& one_side() const { return one_; }
  // Polyline v_0, centroid(T_1), v_1, centroid(T_2), ... in embedded
  // coordinates.
  const std::vector<Complex>& path() const { return path_; }

 private:
  const LatticeDomain* domain_;
  Vertex zero_;
  Vertex one_;
  std::optional<EdgeMidpoint> previous_;
  std::vector<Complex> path_;
  std::size_t steps_ = 0;
  bool terminated_ = false;
};

struct Branch;

// Full Markov state with the harmonic field h_n. Percolation states carry the
// same structure; their unrevealed vertices hold 1/2.
class ExplorerState {
 public:
  ExplorerState(ExplorerWalk walk, HarmonicField field) : walk_(std::move(walk)), field_(std::move(field)) {}

  std::size_t n() const { return walk_.steps(); }
  const HarmonicField& field() const { return field_; }
  const ExplorerWalk& walk() const { return walk_; }
  EdgeMidpoint current_mid() const { return walk_.current_mid(); }
  const std::optional<EdgeMidpoint>& previous_mid() const { return walk_.previous_mid(); }
  const std::vector<Complex>& path() const { return walk_.path(); }
  bool terminated() const { return walk_.terminated(); }
  const std::vector<StepRecord>& step_log() const { return log_; }

  // Probability that the next vertex is coloured 1 (clamped to [0, 1]).
  double next_probability() const;

 private:
  friend ExplorerState step(const ExplorerState&, double, const SolverConfig&);
  friend ExplorerState run(DomainPtr, std::uint64_t, const SolverConfig&, std::uint64_t);
  friend ExplorerState run_percolation(DomainPtr, std::uint64_t, std::uint64_t);
  friend Branch branch(const ExplorerState&, const SolverConfig&);
  void advance(double x, const SolverConfig& cfg, bool solve);

  ExplorerWalk walk_;
  HarmonicField field_;
  std::vector<StepRecord> log_;
};

ExplorerState init(DomainPtr d, const SolverConfig& cfg = {});

// One step with coin x in [0, 1].
ExplorerState step(const ExplorerState& s, double x, const SolverConfig& cfg = {});

// Coin X_{n+1} of a sample, in (0, 1].
double explorer_coin(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t n);
double percolation_coin(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t n);

ExplorerState run(DomainPtr d, std::uint64_t seed, const SolverConfig& cfg = {}, std::uint64_t sample_index = 0);

struct Branch {
  double p = 0.0;
  ExplorerState black;
  ExplorerState white;
};

// The two one-step children: next vertex coloured 1 (probability p) or 0.
Branch branch(const ExplorerState& s, const SolverConfig& cfg = {});

ExplorerState run_percolation(DomainPtr d, std::uint64_t seed, std::uint64_t sample_index = 0);

// Lightweight sample for ensembles: same decisions as run() / run_percolation()
// but without materialising fields.
struct PathSample {
  std::vector<Complex> path;  // embedded coordinates
  std::vector<StepRecord> log;
  bool terminated = false;
  // Final value of h at the probe vertices (HE) or their revealed colour,
  // -1 when unrevealed (percolation).
  std::vector<double> probe_values;
};

// Called after every step; returning true stops the sample early.
using StopRule = std::function<bool(const ExplorerWalk&)>;

PathSample sample_he(const GreenCache& cache, std::uint64_t seed, std::uint64_t sample_index,
                     const std::vector<Vertex>& probes = {}, const StopRule& stop = {});
PathSample sample_percolation(const LatticeDomain& d, std::uint64_t seed, std::uint64_t sample_index,
                              const std::vector<Vertex>& probes = {}, const StopRule& stop = {});

// CSV writers: `step,x,y` and `n,va,vb,p,x,fixed,turn`.
void write_path_csv(std::ostream& os, const std::vector<Complex>& path);
void write_step_log_csv(std::ostream& os, const std::vector<StepRecord>& log);

}  // namespace he
