// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "he/suites.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  double runtime_s = 0.0;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

std::string failures(const std::vector<he::TestEntry>& es) {
  std::string out;
  for (const auto& e : es) {
    if (e.gated && !e.pass) out += (out.empty() ? "" : "; ") + e.name;
  }
  return out;
}

bool all_pass(const std::vector<he::TestEntry>& es) {
  for (const auto& e : es) {
    if (e.gated && !e.pass) return false;
  }
  return true;
}

std::vector<he::TestEntry> select(const he::TestReport& r, const std::function<bool(const he::TestEntry&)>& keep) {
  std::vector<he::TestEntry> out;
  for (const auto& e : r.entries) {
    if (keep(e)) out.push_back(e);
  }
  return out;
}

void write_report(const he::TestReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream jo(dir / "report.json");
  r.write_json(jo);
  std::ofstream co(dir / "report.csv");
  r.write_csv(co);
}

he::TestReport preset(const std::string& name, const fs::path& dir, std::uint64_t seed, int jobs) {
  he::PresetOptions opt;
  opt.name = name;
  opt.seed = seed;
  opt.jobs = jobs;
  opt.out_dir = dir.string();
  auto r = he::run_preset(opt);
  write_report(r, dir);
  return r;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

Outcome entries_outcome(const std::vector<he::TestEntry>& es, double runtime, double limit) {
  Outcome o;
  o.runtime_s = runtime;
  o.pass = all_pass(es) && !es.empty() && (limit <= 0.0 || runtime < limit);
  const auto f = failures(es);
  o.detail = std::to_string(es.size()) + " checks";
  if (!f.empty()) o.detail += ", failed: " + f;
  if (limit > 0.0 && runtime >= limit) o.detail += ", runtime over " + fmt(limit) + " s";
  return o;
}

const he::TestEntry* find(const he::TestReport& r, const std::string& name) {
  for (const auto& e : r.entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

// Byte comparison of every CSV/JSON file in two run directories.
Outcome compare_dirs(const std::vector<std::pair<fs::path, fs::path>>& pairs) {
  Outcome o;
  o.pass = true;
  std::size_t files = 0;
  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  for (const auto& [a, b] : pairs) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) {
      const auto ext = e.path().extension().string();
      if (ext == ".csv" || ext == ".json") names.push_back(e.path().filename().string());
    }
    for (const auto& e : fs::directory_iterator(b)) {
      const auto ext = e.path().extension().string();
      if ((ext == ".csv" || ext == ".json") && !fs::exists(a / e.path().filename())) {
        o.pass = false;
        o.detail += " extra " + (b / e.path().filename()).string();
      }
    }
    for (const auto& n : names) {
      ++files;
      if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) {
        o.pass = false;
        o.detail += " differs " + (a / n).string();
      }
    }
  }
  o.detail = std::to_string(files) + " files compared" + o.detail;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance criteria 1-9");
  std::string out = "acceptance_out";
  std::uint64_t seed = 1;
  int jobs = 1;
  int alt_jobs = 3;
  std::vector<int> only;
  app.add_option("--out", out, "working directory");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--jobs", jobs, "worker threads of the first run")->check(CLI::PositiveNumber);
  app.add_option("--alt-jobs", alt_jobs, "worker threads of the reproducibility rerun")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };

  const fs::path root(out);
  fs::create_directories(root);
  std::vector<std::pair<int, Outcome>> results;
  auto report_line = [&](int c, const Outcome& o) {
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << " ("
              << fmt(o.runtime_s) << " s)" << std::endl;
    results.emplace_back(c, o);
  };

  try {
    if (wanted(1)) {
      const auto t0 = Clock::now();
      he::VerifyOptions opt;
      opt.seed = seed;
      const auto r = he::verify_identities(opt);
      write_report(r, root / "c1");
      report_line(1, entries_outcome(r.entries, since(t0), 60.0));
    }
    if (wanted(2)) {
      const auto t0 = Clock::now();
      const auto es = he::oracle_checks(seed);
      report_line(2, entries_outcome(es, since(t0), 60.0));
    }

    // Criteria 3-8, optionally rerun with another worker count for 9.
    struct Run {
      std::string preset;
      std::vector<int> criteria;
    };
    const std::vector<Run> runs{{"h-martingale", {3}}, {"sle4-control", {4}}, {"he-vs-bm", {5, 6}},
                                {"extraction", {7}},   {"hitting", {8}}};
    std::vector<std::pair<fs::path, fs::path>> rerun_dirs;
    for (const auto& run : runs) {
      bool any = false;
      for (int c : run.criteria) any = any || wanted(c);
      if (!any && !wanted(9)) continue;
      const fs::path dir = root / run.preset;
      const auto t0 = Clock::now();
      const auto r = preset(run.preset, dir, seed, jobs);
      const double rt = since(t0);
      if (run.preset == "h-martingale" && wanted(3)) report_line(3, entries_outcome(r.entries, rt, 300.0));
      if (run.preset == "sle4-control" && wanted(4)) report_line(4, entries_outcome(r.entries, rt, 300.0));
      if (run.preset == "he-vs-bm") {
        if (wanted(5)) {
          auto es = select(r, [](const he::TestEntry& e) {
            return starts_with(e.name, "control: ") || starts_with(e.name, "he scale ") ||
                   starts_with(e.name, "var_deviation_decreases");
          });
          auto o = entries_outcome(es, rt, 0.0);
          for (const auto& e : es) {
            if (starts_with(e.name, "var_deviation_decreases")) {
              o.detail += "; |Var/T - 4| " + fmt(e.expected) + " -> " + fmt(e.statistic);
            }
          }
          report_line(5, o);
        }
        if (wanted(6)) {
          auto es = select(r, [](const he::TestEntry& e) {
            return starts_with(e.name, "percolation_var_exceeds_he") || starts_with(e.name, "he_closer_to_4");
          });
          double perc_rt = 0.0;
          for (const auto& e : r.entries) {
            if (starts_with(e.name, "percolation scale ")) perc_rt = e.runtime_s;
          }
          auto o = entries_outcome(es, perc_rt, 600.0);
          if (!es.empty()) o.detail += "; percolation " + fmt(es[0].statistic) + " vs harmonic explorer " + fmt(es[0].expected);
          report_line(6, o);
        }
      }
      if (run.preset == "extraction" && wanted(7)) report_line(7, entries_outcome(r.entries, rt, 60.0));
      if (run.preset == "hitting" && wanted(8)) {
        auto o = entries_outcome(r.entries, rt, 600.0);
        if (const auto* slope = find(r, "hit_loglog_slope_negative")) o.detail += "; exponent " + fmt(slope->statistic);
        report_line(8, o);
      }
      if (wanted(9)) {
        const fs::path alt = root / (run.preset + "_jobs" + std::to_string(alt_jobs));
        preset(run.preset, alt, seed, alt_jobs);
        rerun_dirs.emplace_back(dir, alt);
      }
    }
    if (wanted(9)) {
      const auto t0 = Clock::now();
      auto o = compare_dirs(rerun_dirs);
      o.runtime_s = since(t0);
      o.detail += ", jobs " + std::to_string(jobs) + " vs " + std::to_string(alt_jobs);
      report_line(9, o);
    }
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 1;
  }

  bool ok = true;
  for (const auto& [c, o] : results) ok = ok && o.pass;
  std::cout << (ok ? "all criteria passed" : "some criteria failed") << std::endl;
  return ok ? 0 : 1;
}
