#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "he/explorer.hpp"
#include "he/suites.hpp"

using namespace he;

namespace {

DomainPtr box(int w, int h) { return std::make_shared<const LatticeDomain>(build_box_domain(w, h)); }

// Field of a state recomputed from the boundary colouring plus the revealed
// colours in its step log.
std::vector<double> oracle_field(const LatticeDomain& d, const std::vector<StepRecord>& log) {
  std::vector<std::uint8_t> mask(d.vertex_count(), 0);
  std::vector<double> vals(d.vertex_count(), 0.0);
  for (std::size_t id = d.interior_count(); id < d.vertex_count(); ++id) {
    mask[id] = 1;
    vals[id] = d.h0(static_cast<int>(id));
  }
  for (const auto& r : log) {
    const auto id = static_cast<std::size_t>(d.id_of(r.v_next));
    if (r.already_fixed) continue;
    mask[id] = 1;
    vals[id] = r.chose_double_prime ? 1.0 : 0.0;
  }
  return test_oracle::dense_extension(d, mask, vals);
}

}  // namespace

TEST_SUITE("explorer") {
  TEST_CASE("initial field is one half on the symmetry axis") {
    const auto d = box(16, 8);
    const auto s = init(d);
    const auto probes = martingale_probes(*d, s.field().values());
    CHECK(s.field().value(probes[0]) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(s.next_probability() == doctest::Approx(0.5).epsilon(1e-10));
  }

  TEST_CASE("runs terminate at the target edge") {
    const auto d = box(14, 8);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = run(d, seed);
      REQUIRE(s.terminated());
      CHECK(s.path().front() == d->v_start().position());
      CHECK(std::abs(s.path().back() - d->v_end().position()) < 1e-12);
      CHECK(s.path().size() == 2 * s.n() + 1);
      CHECK(s.step_log().size() == s.n());
      for (std::size_t i = 1; i + 1 < s.path().size(); ++i) CHECK(d->point_inside(s.path()[i]));
      for (const auto& r : s.step_log()) {
        CHECK(r.x > 0.0);
        CHECK(r.x <= 1.0);
      }
    }
  }

  TEST_CASE("the path never crosses itself") {
    const auto d = box(12, 6);
    const auto s = run_percolation(d, 3);
    std::map<std::pair<long, long>, int> seen;
    for (std::size_t i = 1; i < s.path().size(); i += 2) {
      const auto z = s.path()[i];
      const auto key = std::make_pair(std::lround(z.real() * 1e6), std::lround(z.imag() * 1e6));
      CHECK(seen[key]++ == 0);
    }
  }

  TEST_CASE("determinism") {
    const auto d = box(12, 6);
    const auto a = run(d, 7, {}, 3);
    const auto b = run(d, 7, {}, 3);
    CHECK(a.path() == b.path());
    const auto c = run(d, 7, {}, 4);
    CHECK(explorer_coin(7, 3, 0) != explorer_coin(7, 4, 0));
    CHECK(explorer_coin(7, 3, 0) != percolation_coin(7, 3, 0));
    (void)c;
  }

  TEST_CASE("fast sampler reproduces the full state machine") {
    const auto d = box(16, 8);
    GreenCache full(d), windowed(d, 3.0);
    for (std::uint64_t i = 0; i < 6; ++i) {
      const auto s = run(d, 11, {}, i);
      for (const GreenCache* c : {&full, &windowed}) {
        const auto p = sample_he(*c, 11, i);
        CHECK(p.terminated);
        CHECK(p.path == s.path());
        REQUIRE(p.log.size() == s.step_log().size());
        for (std::size_t k = 0; k < p.log.size(); ++k) {
          CHECK(std::abs(p.log[k].p - s.step_log()[k].p) < 1e-9);
          CHECK(p.log[k].already_fixed == s.step_log()[k].already_fixed);
        }
      }
      const auto q = run_percolation(d, 11, i);
      const auto r = sample_percolation(*d, 11, i);
      CHECK(r.path == q.path());
    }
  }

  TEST_CASE("stop rule halts a sample early") {
    const auto d = box(16, 8);
    GreenCache cache(d);
    const auto p = sample_he(cache, 1, 0, {}, [](const ExplorerWalk& w) { return w.steps() >= 3; });
    CHECK_FALSE(p.terminated);
    CHECK(p.log.size() == 3);
    CHECK(p.path.size() == 7);
  }

  TEST_CASE("branch children equal coin steps") {
    const auto d = box(12, 6);
    auto s = init(d);
    for (int k = 0; k < 4; ++k) {
      const auto b = branch(s);
      CHECK(b.p == doctest::Approx(s.next_probability()));
      CHECK(b.black.path() == step(s, 0.0).path());
      if (b.p < 1.0) CHECK(b.white.path() == step(s, 1.0).path());
      s = k % 2 ? b.black : b.white;
    }
  }

  TEST_CASE("eight-step enumeration against the dense oracle") {
    const auto d = box(10, 6);
    const std::size_t depth = 8;
    double total = 0.0;
    std::size_t leaves = 0;
    std::function<void(const ExplorerState&, double)> visit = [&](const ExplorerState& s, double w) {
      const auto ref = oracle_field(*d, s.step_log());
      for (std::size_t id = 0; id < d->vertex_count(); ++id) {
        REQUIRE(std::abs(s.field().value(static_cast<int>(id)) - ref[id]) < 1e-9);
      }
      if (s.n() == depth || s.terminated()) {
        total += w;
        ++leaves;
        return;
      }
      const auto b = branch(s);
      const int id = d->id_of(s.walk().next_vertex());
      if (s.field().is_fixed(id)) {
        CHECK((b.p == 0.0 || b.p == 1.0));
        visit(b.black, w);
        return;
      }
      CHECK(b.p == doctest::Approx(std::clamp(ref[static_cast<std::size_t>(id)], 0.0, 1.0)).epsilon(1e-9));
      // one-step martingale at every vertex
      for (std::size_t v = 0; v < d->vertex_count(); ++v) {
        const double next = b.p * b.black.field().values()[v] + (1 - b.p) * b.white.field().values()[v];
        CHECK(std::abs(next - s.field().values()[v]) < 1e-9);
      }
      if (b.p > 0) visit(b.black, w * b.p);
      if (b.p < 1) visit(b.white, w * (1 - b.p));
    };
    visit(init(d), 1.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(leaves > 20);
  }

  TEST_CASE("percolation reveals with probability one half") {
    const auto d = box(12, 6);
    const auto s = run_percolation(d, 5);
    for (const auto& r : s.step_log()) {
      if (r.already_fixed) {
        CHECK((r.p == 0.0 || r.p == 1.0));
      } else {
        CHECK(r.p == 0.5);
        CHECK(r.chose_double_prime == (r.x <= 0.5));
      }
    }
  }

  TEST_CASE("csv writers") {
    const auto d = box(10, 4);
    const auto s = run(d, 1);
    std::ostringstream path, steps;
    write_path_csv(path, s.path());
    write_step_log_csv(steps, s.step_log());
    CHECK(path.str().rfind("step,x,y\n", 0) == 0);
    CHECK(steps.str().rfind("n,va,vb,p,x,fixed,turn\n", 0) == 0);
    const std::string text = path.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(s.path().size() + 1));
  }

  TEST_CASE("errors") {
    const auto d = box(10, 4);
    auto s = run(d, 1);
    CHECK_THROWS_AS(step(s, 0.5), Error);
    CHECK_THROWS_AS(step(init(d), 1.5), Error);
  }
}
