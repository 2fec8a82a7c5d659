#pragma once
// Ensembles and the statistical test suite.
//
// Lattice paths are moved to the half-plane by translating v_start to 0 and
// keeping lattice units; the conformal map of a box onto the half-plane is
// approximated by this identity near v_start, so capacities stay well below
// the squared domain scale.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "he/explorer.hpp"
#include "he/loewner.hpp"
#include "he/report.hpp"

namespace he {

struct DomainSpec {
  enum class Kind { Box, Hexagon, Random, File };
  Kind kind = Kind::Box;
  int width = 200;
  int height = 100;
  std::optional<int> offset;
  int radius = 8;
  int scale = 12;
  std::uint64_t seed = 1;
  std::string path;

  LatticeDomain build() const;
  nlohmann::json to_json() const;
};

// Split-centred box of the given height and twice that width.
DomainSpec box_spec(int scale);

// Point of the half-plane picture of a domain.
Complex to_half_plane(const LatticeDomain& d, Complex z);

// Runs fn(i) for i in [0, n); worker j takes i = j, j + jobs, ... The failure
// with the lowest index is rethrown as Error("sample i: ...").
void parallel_for(std::int64_t n, int jobs, const std::function<void(std::int64_t)>& fn);

enum class Process { HarmonicExplorer, Percolation, Sle };

struct EnsembleConfig {
  Process process = Process::HarmonicExplorer;
  DomainSpec domain;
  std::int64_t n_samples = 2000;
  std::uint64_t master_seed = 1;
  // Capacity at which lattice samples stop; 0 runs them to termination.
  double horizon_T = 1.0;
  // Times at which W is recorded.
  std::vector<double> checkpoints;
  std::vector<Vertex> probes;
  SolverConfig solver;
  double dt_max = 1e-3;
  // SLE parameters.
  double kappa = 4.0;
  double dt = 1e-4;
  // SLE trace stride; 0 computes no trace.
  std::size_t trace_stride = 0;
  // Angle observable at angle_point, recorded at angle_times (SLE).
  std::vector<double> angle_times;
  Complex angle_point{0.0, 2.0};
  // Radius of the cached Green's function window (lattice units); <= 0
  // caches every vertex.
  double green_window = 60.0;
  bool keep_paths = false;
  int jobs = 1;

  nlohmann::json to_json() const;
};

struct Sample {
  std::size_t steps = 0;
  bool terminated = false;
  double capacity = 0.0;
  std::vector<double> w_at;  // W at the checkpoints
  std::vector<double> probe_values;
  std::vector<double> angle_values;
  // Half-plane curve and the capacity reached at each point (keep_paths).
  std::vector<Complex> curve;
  std::vector<double> curve_t;
};

struct SampleStore {
  EnsembleConfig config;
  std::vector<Sample> samples;
};

// Samples are independent and reproducible from (master_seed, index); the
// result does not depend on cfg.jobs.
SampleStore run_ensemble(const EnsembleConfig& cfg);

// One row per sample: index, steps, terminated, capacity, checkpoint values,
// probe values, angle values.
void write_store_csv(std::ostream& os, const SampleStore& store);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t n = 0;
};
Moments moments(const std::vector<double>& xs);

// Terminal colour at probe k against the exact h_0.
TestEntry test_h_martingale(const SampleStore& store, std::size_t probe, double h0);

struct DrivingTolerances {
  double var = 0.05;
  double qv = 0.05;
  double ks_level = 0.01;
};

// Mean, variance slope, increment normality and quadratic variation of W at
// the store's checkpoints.
std::vector<TestEntry> test_driving_bm(const SampleStore& store, const DrivingTolerances& tol = {});

// Var W(t)/t at checkpoint k.
double variance_ratio(const SampleStore& store, std::size_t checkpoint);

// Ensemble mean of the angle observable at each recorded time against its
// value at time 0.
std::vector<TestEntry> test_angle_martingale(const SampleStore& store);

struct ProfileResult {
  int scale = 0;
  double max_deviation = 0.0;
  std::size_t vertices = 0;
};

// max |h_0(v) - (1 - arg(z_v)/pi)| over vertices of box_spec(scale) with
// |z_v| <= 2 sqrt(scale) and inradius >= sqrt(scale)/2.
ProfileResult harmonic_profile(int scale, const SolverConfig& cfg = {});
std::vector<TestEntry> test_harmonic_profile(int scale, double threshold = 0.05, const SolverConfig& cfg = {});

// Whether some component of B(z, R) intersected with the domain touches both
// boundary arcs.
bool hit_hypothesis_violated(const LatticeDomain& d, Complex z, double R);

struct HitEstimate {
  double r = 0.0;
  double frequency = 0.0;
  double standard_error = 0.0;
  std::int64_t samples = 0;
};

// Frequencies of HE paths meeting B(z, r) for each radius, from one set of
// M runs to termination. Throws if the hypothesis fails.
std::vector<HitEstimate> estimate_hit_probability(const DomainSpec& spec, Complex z, const std::vector<double>& radii,
                                                  double R, std::int64_t M, std::uint64_t seed, int jobs = 1);
HitEstimate estimate_hit_probability(const DomainSpec& spec, Complex z, double r, double R, std::int64_t M,
                                     std::uint64_t seed, int jobs = 1);

// Least-squares slope of log frequency against log(r/R).
double hit_exponent(const std::vector<HitEstimate>& est, double R);

struct CompareOptions {
  std::vector<double> t_grid{0.25, 0.5, 1.0};
  double ks_level = 0.01;
  double return_radius = 0.5;
  std::vector<double> return_t0{0.25, 1.0};
};

// Two-sample comparisons of curve functionals and the return frequency to
// B(0, R) after capacity T0. Both stores need curves.
std::vector<TestEntry> compare_he_sle(const SampleStore& a, const SampleStore& b, const CompareOptions& opt = {});

}  // namespace he
