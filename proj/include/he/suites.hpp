#pragma once
// The exact-identity verifier and the named statistical presets run by the
// command-line tool and the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

#include "he/report.hpp"
#include "he/stats.hpp"

namespace he {

struct VerifyOptions {
  // "default": ten random domains of scales 6 to 20; "tiny": domains with
  // at most 12 free vertices.
  std::string corpus = "default";
  // Adds the brute-force walk-summation cross-checks.
  bool oracle = false;
  std::uint64_t seed = 1;
  // Negative control: added to every identity error.
  double perturb = 0.0;
};

std::vector<LatticeDomain> verify_corpus(const std::string& name, std::uint64_t seed);

TestReport verify_identities(const VerifyOptions& opt);

// Oracle agreement of total_mass, visit_integral and harmonic_measure_edges
// on the tiny corpus.
std::vector<TestEntry> oracle_checks(std::uint64_t seed, double perturb = 0.0);

struct PresetOptions {
  std::string name;
  // 0 selects the preset's default.
  int scale = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 1;
  int jobs = 1;
  // Per-ensemble sample CSVs are written here when set.
  std::string out_dir;
};

const std::vector<std::string>& preset_names();

// Throws UsageError for an unknown preset.
TestReport run_preset(const PresetOptions& opt);

class UsageError : public Error {
 public:
  using Error::Error;
};

// Probe vertices of the terminal-colour test on a box: a vertex on the
// symmetry axis, one next to the 1-coloured arc with h0 near 0.95, one with
// h0 near 0.25.
std::vector<Vertex> martingale_probes(const LatticeDomain& d, const VertexFunction& h0);

}  // namespace he
