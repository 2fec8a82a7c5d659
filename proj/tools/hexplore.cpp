// hexplore: domains, harmonic explorer samples, driving functions, SLE
// traces, the exact-identity verifier and the statistical presets.
//
// Exit status: 0 success, 1 failed tests or runtime failure, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "he/explorer.hpp"
#include "he/loewner.hpp"
#include "he/stats.hpp"
#include "he/suites.hpp"
#include "json.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Flat `key = value` file; keys are long flag names. Values only fill
// options not given on the command line.
std::map<std::string, std::string> apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw he::UsageError("cannot read config file " + path);
  std::map<std::string, std::string> echo;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw he::UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    echo[key] = value;
    auto* opt = sub->get_option_no_throw("--" + key);
    if (!opt || key == "config") throw he::UsageError(path + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
  return echo;
}

json flag_echo(const CLI::App* sub) {
  json flags = json::object();
  for (const auto* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    const auto results = opt->results();
    if (opt->get_expected_max() == 0) {
      flags[name] = opt->count() > 0;
    } else if (!results.empty()) {
      flags[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else {
      flags[name] = opt->get_default_str();
    }
  }
  return flags;
}

struct Manifest {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::string started = utc_now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  json flags;
  json config_file = nullptr;
  std::vector<std::string> argv;
  json outputs = json::array();
  json extra = json::object();

  void write(const fs::path& dir) const {
    json j = {{"tool", "hexplore"},
              {"version", he::kVersion},
              {"subcommand", subcommand},
              {"argv", argv},
              {"flags", flags},
              {"config_file", config_file},
              {"master_seed", seed},
              {"outputs", outputs},
              {"started", started},
              {"finished", utc_now()},
              {"runtime_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    fs::create_directories(dir);
    std::ofstream os(dir / "manifest.json");
    os << j.dump(2) << '\n';
    if (!os) throw he::Error("cannot write " + (dir / "manifest.json").string());
  }
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw he::Error("cannot write " + p.string());
  return os;
}

// Domain selection shared by `domain` and `run`.
struct DomainFlags {
  std::string box;
  int hexagon = 0;
  int random = 0;
  std::string file;
  int offset = -1;
  std::uint64_t domain_seed = 1;

  void add(CLI::App* sub, bool with_file) {
    sub->add_option("--box", box, "box domain WxH (width vertices, height rows)");
    sub->add_option("--hexagon", hexagon, "hexagon of the given radius");
    sub->add_option("--random", random, "random domain of the given scale");
    sub->add_option("--offset", offset, "split offset of a box domain");
    sub->add_option("--domain-seed", domain_seed, "seed of a random domain");
    if (with_file) sub->add_option("--domain", file, "HEDOM domain file");
  }

  he::DomainSpec spec() const {
    const int chosen = (box.empty() ? 0 : 1) + (hexagon > 0 ? 1 : 0) + (random > 0 ? 1 : 0) + (file.empty() ? 0 : 1);
    if (chosen != 1) throw he::UsageError("choose exactly one domain source");
    he::DomainSpec s;
    if (!box.empty()) {
      int w = 0, h = 0;
      char x = 0;
      std::istringstream is(box);
      if (!(is >> w >> x >> h) || x != 'x' || !is.eof()) throw he::UsageError("--box expects WxH, e.g. 40x20");
      s.kind = he::DomainSpec::Kind::Box;
      s.width = w;
      s.height = h;
      if (offset >= 0) s.offset = offset;
    } else if (hexagon > 0) {
      s.kind = he::DomainSpec::Kind::Hexagon;
      s.radius = hexagon;
    } else if (random > 0) {
      s.kind = he::DomainSpec::Kind::Random;
      s.scale = random;
      s.seed = domain_seed;
    } else {
      s.kind = he::DomainSpec::Kind::File;
      s.path = file;
    }
    return s;
  }

  // Invalid parameters are usage errors.
  he::LatticeDomain build() const {
    const auto s = spec();
    try {
      return s.build();
    } catch (const he::UsageError&) {
      throw;
    } catch (const he::Error& e) {
      throw he::UsageError(e.what());
    }
  }
};

std::string numbered(const std::string& stem, std::int64_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%05lld.csv", static_cast<long long>(i));
  return stem + buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Harmonic explorer and SLE(4) toolkit");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(he::kVersion));
  app.option_defaults()->always_capture_default();

  std::string config_path;
  std::string out = ".";
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string svg_path;

  DomainFlags dflags;
  auto* domain_cmd = app.add_subcommand("domain", "build a domain and write it as HEDOM");
  dflags.add(domain_cmd, false);
  std::string domain_out = "domain.hedom";
  domain_cmd->add_option("-o,--output", domain_out, "domain file");
  domain_cmd->add_option("--svg", svg_path, "SVG of the boundary arcs");

  DomainFlags rflags;
  auto* run_cmd = app.add_subcommand("run", "sample exploration paths");
  rflags.add(run_cmd, true);
  std::int64_t samples = 1;
  bool percolation = false;
  run_cmd->add_option("--samples", samples, "number of samples")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--percolation", percolation, "percolation interface instead of the harmonic explorer");
  run_cmd->add_option("--svg", svg_path, "SVG of the domain with the first path");

  auto* driving_cmd = app.add_subcommand("driving", "extract the Loewner driving function of a path");
  std::string path_file;
  double dt_max = 1e-3;
  double horizon = 0.0;
  driving_cmd->add_option("--path", path_file, "path CSV (last two columns x,y)")->required();
  driving_cmd->add_option("--dt-max", dt_max, "largest capacity increment per slit")->check(CLI::PositiveNumber);
  driving_cmd->add_option("--T", horizon, "stop once this capacity is reached (0: whole path)");

  auto* sle_cmd = app.add_subcommand("sle", "sample an SLE trace and its driving function");
  double kappa = 4.0, dt = 1e-4, sle_T = 1.0;
  std::size_t stride = 1;
  sle_cmd->add_option("--kappa", kappa, "kappa")->check(CLI::NonNegativeNumber);
  sle_cmd->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
  sle_cmd->add_option("--T", sle_T, "final capacity")->check(CLI::PositiveNumber);
  sle_cmd->add_option("--stride", stride, "trace every stride-th grid time")->check(CLI::PositiveNumber);
  std::uint64_t sle_index = 0;
  sle_cmd->add_option("--index", sle_index, "sample index");
  sle_cmd->add_option("--svg", svg_path, "SVG of the trace");

  auto* verify_cmd = app.add_subcommand("verify", "exact identity suite");
  std::string corpus = "default";
  bool oracle = false;
  double perturb = 0.0;
  verify_cmd->add_option("--corpus", corpus, "default | tiny");
  verify_cmd->add_flag("--oracle", oracle, "add the brute-force walk-summation cross-checks");
  verify_cmd->add_option("--perturb", perturb, "test mode: add this to every identity error");

  auto* stats_cmd = app.add_subcommand("stats", "statistical suite");
  std::string preset;
  int scale = 0;
  std::int64_t stat_samples = 0;
  stats_cmd->add_option("--preset", preset, "one of the named presets")->required();
  stats_cmd->add_option("--scale", scale, "domain scale (preset default when omitted)");
  stats_cmd->add_option("--samples", stat_samples, "ensemble size (preset default when omitted)");

  for (auto* sub : {domain_cmd, run_cmd, driving_cmd, sle_cmd, verify_cmd, stats_cmd}) {
    sub->add_option("--config", config_path, "flat key = value file; flags override it");
    if (sub != domain_cmd) sub->add_option("--out", out, "output directory");
    if (sub != domain_cmd && sub != driving_cmd) sub->add_option("--seed", seed, "master seed");
    if (sub == run_cmd || sub == stats_cmd) sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Manifest manifest;
  manifest.subcommand = sub->get_name();
  for (int i = 0; i < argc; ++i) manifest.argv.emplace_back(argv[i]);

  try {
    if (!config_path.empty()) {
      const auto echo = apply_config(sub, config_path);
      manifest.config_file = {{"path", config_path}, {"values", echo}};
    }
    manifest.flags = flag_echo(sub);
    manifest.seed = seed;
    if (jobs < 1) throw he::UsageError("--jobs must be at least 1");

    if (sub == domain_cmd) {
      const auto d = dflags.build();
      const fs::path target(domain_out);
      auto os = open_out(target);
      he::write_domain(os, d);
      os.close();
      manifest.outputs.push_back(target.filename().string());
      if (!svg_path.empty()) {
        auto so = open_out(svg_path);
        he::svg::write_domain(so, d);
        manifest.outputs.push_back(svg_path);
      }
      manifest.extra["domain"] = dflags.spec().to_json();
      manifest.write(target.has_parent_path() ? target.parent_path() : fs::path("."));
      return 0;
    }

    if (sub == run_cmd) {
      const auto dp = std::make_shared<const he::LatticeDomain>(rflags.build());
      std::unique_ptr<he::GreenCache> cache;
      if (!percolation) cache = std::make_unique<he::GreenCache>(dp, 0.0);
      const fs::path dir(out);
      fs::create_directories(dir);
      std::vector<std::vector<he::Complex>> first_path(1);
      he::parallel_for(samples, jobs, [&](std::int64_t i) {
        const auto idx = static_cast<std::uint64_t>(i);
        const he::PathSample ps = percolation ? he::sample_percolation(*dp, seed, idx) : he::sample_he(*cache, seed, idx);
        auto po = open_out(dir / numbered("path", i));
        he::write_path_csv(po, ps.path);
        auto lo = open_out(dir / numbered("steps", i));
        he::write_step_log_csv(lo, ps.log);
        if (i == 0) first_path[0] = ps.path;
      });
      for (std::int64_t i = 0; i < samples; ++i) {
        manifest.outputs.push_back(numbered("path", i));
        manifest.outputs.push_back(numbered("steps", i));
      }
      if (!svg_path.empty()) {
        auto so = open_out(svg_path);
        he::svg::write_domain(so, *dp, first_path);
      }
      manifest.extra["process"] = percolation ? "percolation" : "harmonic-explorer";
      manifest.extra["domain"] = rflags.spec().to_json();
      manifest.write(dir);
      return 0;
    }

    if (sub == driving_cmd) {
      std::ifstream is(path_file);
      if (!is) throw he::UsageError("cannot read " + path_file);
      auto pts = he::read_path_csv(is);
      if (pts.size() < 2) throw he::UsageError("path needs at least two points");
      const he::Complex origin = pts.front();
      he::DrivingExtractor ex(he::ExtractionConfig{dt_max});
      for (std::size_t k = 1; k < pts.size(); ++k) {
        if (horizon > 0.0 && ex.capacity() >= horizon) break;
        ex.push(pts[k] - origin);
      }
      const fs::path dir(out);
      auto os = open_out(dir / "driving.csv");
      he::write_driving_csv(os, ex.driving());
      manifest.outputs.push_back("driving.csv");
      manifest.extra["origin"] = {origin.real(), origin.imag()};
      manifest.write(dir);
      return 0;
    }

    if (sub == sle_cmd) {
      const auto sp = he::sle_path(kappa, dt, sle_T, seed, sle_index, stride);
      const fs::path dir(out);
      auto d_os = open_out(dir / "driving.csv");
      he::write_driving_csv(d_os, sp.driving);
      auto t_os = open_out(dir / "trace.csv");
      he::write_trace_csv(t_os, sp.trace);
      manifest.outputs = {"driving.csv", "trace.csv"};
      if (!svg_path.empty()) {
        auto so = open_out(svg_path);
        he::svg::write_curves(so, {sp.trace.curve.points});
      }
      manifest.write(dir);
      return 0;
    }

    he::TestReport report;
    if (sub == verify_cmd) {
      he::VerifyOptions opt;
      opt.corpus = corpus;
      opt.oracle = oracle;
      opt.seed = seed;
      opt.perturb = perturb;
      report = he::verify_identities(opt);
    } else {
      he::PresetOptions opt;
      opt.name = preset;
      opt.scale = scale;
      opt.samples = stat_samples;
      opt.seed = seed;
      opt.jobs = jobs;
      opt.out_dir = out;
      report = he::run_preset(opt);
    }
    const fs::path dir(out);
    auto jo = open_out(dir / "report.json");
    report.write_json(jo);
    auto co = open_out(dir / "report.csv");
    report.write_csv(co);
    jo.close();
    co.close();
    json runtimes = json::object();
    for (const auto& e : report.entries) runtimes[e.name] = e.runtime_s;
    manifest.extra["runtimes_s"] = runtimes;
    manifest.outputs = {"report.json", "report.csv"};
    std::vector<std::string> raw;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("samples_", 0) == 0 || name == "hitting.csv") raw.push_back(name);
    }
    std::sort(raw.begin(), raw.end());
    for (const auto& name : raw) manifest.outputs.push_back(name);
    manifest.write(dir);

    for (const auto& e : report.entries) {
      std::cout << (e.pass ? "PASS " : (e.gated ? "FAIL " : "info ")) << e.name << "  statistic=" << e.statistic
                << " expected=" << e.expected << " tolerance=" << e.tolerance << '\n';
    }
    std::cout << (report.passed() ? "all gated tests passed" : "gated test failures") << '\n';
    return report.passed() ? 0 : kExitFail;
  } catch (const he::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
