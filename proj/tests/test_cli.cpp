#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int hexplore(const std::string& args) {
  const std::string cmd = std::string(HEXPLORE_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hexplore_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    CHECK(hexplore("--version") == 0);
    CHECK(hexplore("") == 2);
    CHECK(hexplore("frobnicate") == 2);
    CHECK(hexplore("domain --box 3x1 -o " + (dir / "x.hedom").string()) == 2);
    CHECK(hexplore("stats --preset nope --out " + dir.string()) == 2);
    CHECK(hexplore("stats --out " + dir.string()) == 2);
    CHECK(hexplore("run --box 12x6 --jobs 0 --out " + dir.string()) == 2);
    CHECK(hexplore("driving --path " + (dir / "missing.csv").string() + " --out " + dir.string()) == 2);
  }

  TEST_CASE("domain and run") {
    const auto dir = scratch("run");
    REQUIRE(hexplore("domain --box 16x8 -o " + (dir / "box.hedom").string() + " --svg " + (dir / "box.svg").string()) == 0);
    CHECK(slurp(dir / "box.hedom").rfind("HEDOM 1", 0) == 0);
    CHECK(slurp(dir / "box.svg").find("<svg") != std::string::npos);
    const std::string base = "run --domain " + (dir / "box.hedom").string() + " --samples 3 --seed 5 --out ";
    REQUIRE(hexplore(base + (dir / "a").string()) == 0);
    REQUIRE(hexplore(base + (dir / "b").string() + " --jobs 2") == 0);
    for (const char* f : {"path_00000.csv", "path_00002.csv", "steps_00001.csv"}) {
      CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    const auto m = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(m["master_seed"] == 5);
    CHECK(m["outputs"].size() == 6);
    REQUIRE(hexplore("run --hexagon 6 --percolation --out " + (dir / "p").string()) == 0);
    CHECK(fs::exists(dir / "p" / "path_00000.csv"));
  }

  TEST_CASE("driving and sle") {
    const auto dir = scratch("sle");
    REQUIRE(hexplore("sle --T 0.05 --dt 1e-3 --out " + dir.string()) == 0);
    CHECK(slurp(dir / "trace.csv").size() > 0);
    REQUIRE(hexplore("driving --path " + (dir / "trace.csv").string() + " --out " + (dir / "back").string()) == 0);
    CHECK(fs::exists(dir / "back" / "driving.csv"));
  }

  TEST_CASE("verify") {
    const auto dir = scratch("verify");
    CHECK(hexplore("verify --corpus tiny --oracle --out " + dir.string()) == 0);
    const auto r = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(r.dump().find("runtime") == std::string::npos);
    CHECK(hexplore("verify --corpus tiny --perturb 1e-6 --out " + dir.string()) == 1);
  }

  TEST_CASE("config file values yield to flags") {
    const auto dir = scratch("config");
    {
      std::ofstream cfg(dir / "run.cfg");
      cfg << "# sample config\nbox = 12x6\nsamples = 2\nseed = 9\n";
    }
    REQUIRE(hexplore("run --config " + (dir / "run.cfg").string() + " --out " + (dir / "a").string()) == 0);
    CHECK(fs::exists(dir / "a" / "path_00001.csv"));
    auto m = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(m["master_seed"] == 9);
    REQUIRE(hexplore("run --config " + (dir / "run.cfg").string() + " --seed 4 --out " + (dir / "b").string()) == 0);
    m = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"));
    CHECK(m["master_seed"] == 4);
    {
      std::ofstream bad(dir / "bad.cfg");
      bad << "colour = blue\n";
    }
    CHECK(hexplore("run --config " + (dir / "bad.cfg").string() + " --out " + dir.string()) == 2);
  }
}
