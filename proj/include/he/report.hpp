#pragma once
// Structured results of the statistical and exact test suites.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace he {

inline constexpr const char* kVersion = "1.0.0";

struct TestEntry {
  std::string name;
  // The property or identity the entry checks.
  std::string provenance;
  double statistic = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::int64_t samples = 0;
  double runtime_s = 0.0;
  std::string note;
  // Informational entries never fail a report.
  bool gated = true;
};

class TestReport {
 public:
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<TestEntry> entries;

  void add(TestEntry e) { entries.push_back(std::move(e)); }
  void append(const std::vector<TestEntry>& es) { entries.insert(entries.end(), es.begin(), es.end()); }
  bool passed() const;

  // Runtimes are left out unless asked for, so reports of identical runs are
  // byte-identical.
  nlohmann::json to_json(bool with_runtime = false) const;
  void write_json(std::ostream& os) const;
  // `name,statistic,expected,tolerance,pass,samples` rows.
  void write_csv(std::ostream& os) const;
};

}  // namespace he
