#include "he/report.hpp"

#include <ostream>

namespace he {

bool TestReport::passed() const {
  for (const auto& e : entries) {
    if (e.gated && !e.pass) return false;
  }
  return true;
}

nlohmann::json TestReport::to_json(bool with_runtime) const {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j = {{"name", e.name},           {"provenance", e.provenance}, {"statistic", e.statistic},
                        {"expected", e.expected},   {"tolerance", e.tolerance},   {"pass", e.pass},
                        {"samples", e.samples},     {"gated", e.gated}};
    if (!e.note.empty()) j["note"] = e.note;
    if (with_runtime) j["runtime_s"] = e.runtime_s;
    tests.push_back(std::move(j));
  }
  return {{"version", kVersion}, {"seed", seed}, {"config", config}, {"passed", passed()}, {"tests", tests}};
}

void TestReport::write_json(std::ostream& os) const { os << to_json().dump(2) << '\n'; }

void TestReport::write_csv(std::ostream& os) const {
  os << "name,statistic,expected,tolerance,pass,samples\n";
  os.precision(17);
  for (const auto& e : entries) {
    os << e.name << ',' << e.statistic << ',' << e.expected << ',' << e.tolerance << ',' << (e.pass ? 1 : 0) << ','
       << e.samples << '\n';
  }
}

}  // namespace he
