#include <cmath>
#include <sstream>

#include "doctest.h"
#include "he/stats.hpp"
#include "he/suites.hpp"

using namespace he;

namespace {

EnsembleConfig small_he(Process p = Process::HarmonicExplorer) {
  EnsembleConfig c;
  c.process = p;
  c.domain = box_spec(16);
  c.n_samples = 12;
  c.master_seed = 21;
  c.horizon_T = 2.0;
  c.checkpoints = {0.5, 1.0, 2.0};
  c.green_window = 0.0;
  return c;
}

std::string csv(const SampleStore& s) {
  std::ostringstream os;
  write_store_csv(os, s);
  return os.str();
}

SampleStore synthetic(std::size_t M, const std::vector<double>& cps) {
  SampleStore st;
  st.config.checkpoints = cps;
  for (std::size_t i = 0; i < M; ++i) {
    Sample s;
    s.capacity = cps.back();
    s.terminated = true;
    for (double t : cps) s.w_at.push_back((i % 2 ? 2.0 : -2.0) * std::sqrt(t));
    st.samples.push_back(s);
  }
  return st;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("ensembles are deterministic and independent of the worker count") {
    for (Process p : {Process::HarmonicExplorer, Process::Percolation}) {
      auto c = small_he(p);
      const auto a = csv(run_ensemble(c));
      CHECK(a == csv(run_ensemble(c)));
      c.jobs = 3;
      CHECK(a == csv(run_ensemble(c)));
    }
    EnsembleConfig s;
    s.process = Process::Sle;
    s.n_samples = 8;
    s.horizon_T = 1.0;
    s.dt = 1e-3;
    s.checkpoints = {0.5, 1.0};
    s.angle_times = {0.0, 1.0};
    const auto a = csv(run_ensemble(s));
    s.jobs = 4;
    CHECK(a == csv(run_ensemble(s)));
  }

  TEST_CASE("a one-sample ensemble is a single explorer run") {
    auto c = small_he();
    c.n_samples = 1;
    c.horizon_T = 0.0;
    c.checkpoints.clear();
    c.keep_paths = true;
    const auto st = run_ensemble(c);
    const auto d = std::make_shared<const LatticeDomain>(c.domain.build());
    const auto r = run(d, c.master_seed, {}, 0);
    REQUIRE(st.samples[0].curve.size() == r.path().size());
    CHECK(st.samples[0].terminated);
    CHECK(st.samples[0].steps == r.n());
    for (std::size_t k = 0; k < r.path().size(); ++k) {
      CHECK(std::abs(st.samples[0].curve[k] - (r.path()[k] - d->v_start().position())) < 1e-12);
    }
  }

  TEST_CASE("horizon stops samples at the requested capacity") {
    auto c = small_he();
    c.keep_paths = true;
    for (const auto& s : run_ensemble(c).samples) {
      CHECK(s.capacity >= 2.0);
      CHECK(s.w_at.size() == 3);
      CHECK(s.curve.size() == s.curve_t.size());
      CHECK(s.curve_t.back() == s.capacity);
      // each step adds two points; before the last step the horizon was not reached
      CHECK(s.curve_t[s.curve_t.size() - 3] < 2.0);
    }
  }

  TEST_CASE("moments") {
    const auto m = moments({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == 2.5);
    CHECK(m.variance == doctest::Approx(5.0 / 3.0));
    CHECK(moments({}).n == 0);
  }

  TEST_CASE("terminal colour test uses binomial three-sigma tolerance") {
    SampleStore st;
    st.config.probes = {{0, 3}};
    for (int i = 0; i < 10000; ++i) {
      Sample s;
      s.terminated = true;
      s.probe_values = {i % 2 ? 1.0 : 0.0};
      st.samples.push_back(s);
    }
    const auto e = test_h_martingale(st, 0, 0.5);
    CHECK(e.tolerance == doctest::Approx(0.015));
    CHECK(e.statistic == 0.5);
    CHECK(e.pass);
    CHECK_FALSE(test_h_martingale(st, 0, 0.52).pass);
    st.samples[0].terminated = false;
    CHECK_THROWS_AS(test_h_martingale(st, 0, 0.5), Error);
  }

  TEST_CASE("driving statistics on a synthetic store") {
    const auto st = synthetic(1000, {0.25, 1.0});
    // W(t) = +-2 sqrt(t): sample variance 4t M/(M-1)
    CHECK(variance_ratio(st, 0) == doctest::Approx(4.0 * 1000 / 999).epsilon(1e-12));
    const auto es = test_driving_bm(st);
    for (const auto& e : es) {
      if (e.name.rfind("mean_W", 0) == 0 || e.name.rfind("var_W", 0) == 0) CHECK(e.pass);
      // increments 1 and 2 - 1 = 1: squared sum 2 over T = 1
      if (e.name == "quadratic_variation/T") CHECK(e.statistic == doctest::Approx(2.0));
      if (e.name == "ks_normal_increments") CHECK_FALSE(e.pass);  // two-point law
    }
    auto short_store = st;
    short_store.samples[5].capacity = 0.5;
    CHECK_THROWS_AS(test_driving_bm(short_store), Error);
  }

  TEST_CASE("SLE control passes the driving and angle tests") {
    EnsembleConfig s;
    s.process = Process::Sle;
    s.n_samples = 2000;
    s.horizon_T = 1.0;
    s.dt = 1e-2;
    s.checkpoints = {0.25, 0.5, 1.0};
    s.angle_times = {0.0, 0.5};
    s.master_seed = 3;
    const auto st = run_ensemble(s);
    for (const auto& e : test_driving_bm(st)) {
      CAPTURE(e.name);
      CHECK(e.pass);
    }
    for (const auto& e : test_angle_martingale(st)) {
      CAPTURE(e.name);
      CHECK(e.pass);
    }
  }

  TEST_CASE("harmonic profile") {
    const auto a = harmonic_profile(20);
    const auto b = harmonic_profile(40);
    CHECK(a.vertices > 0);
    CHECK(b.vertices > a.vertices);
    CHECK(b.max_deviation < a.max_deviation);
  }

  TEST_CASE("hitting frequencies") {
    const DomainSpec spec = box_spec(20);
    const auto d = spec.build();
    const Complex z = d.v_start().position() + Complex(0.375 * 20, 0.5 * std::sqrt(3.0) / 2.0 * 20);
    const double R = 0.3 * 20;
    CHECK_FALSE(hit_hypothesis_violated(d, z, R));
    CHECK(hit_hypothesis_violated(d, d.v_start().position(), R));
    const auto est = estimate_hit_probability(spec, z, {R / 2, R / 4, R / 8}, R, 200, 5);
    REQUIRE(est.size() == 3);
    CHECK(est[0].frequency >= est[1].frequency);
    CHECK(est[1].frequency >= est[2].frequency);
    const auto one = estimate_hit_probability(spec, z, R / 4, R, 200, 5);
    CHECK(one.frequency == est[1].frequency);
    CHECK_THROWS_AS(estimate_hit_probability(spec, z, {2 * R}, R, 10, 5), Error);
    CHECK_THROWS_AS(estimate_hit_probability(spec, d.v_start().position(), {1.0}, R, 10, 5), Error);
    const std::vector<HitEstimate> fake{{0.5, 0.5, 0, 1}, {0.25, 0.125, 0, 1}};
    CHECK(hit_exponent(fake, 1.0) == doctest::Approx(2.0));
  }

  TEST_CASE("two independent SLE ensembles are not told apart") {
    EnsembleConfig s;
    s.process = Process::Sle;
    s.n_samples = 300;
    s.horizon_T = 1.0;
    s.dt = 1e-3;
    s.trace_stride = 10;
    auto a = s;
    a.master_seed = 1;
    auto b = s;
    b.master_seed = 2;
    const auto es = compare_he_sle(run_ensemble(a), run_ensemble(b));
    for (const auto& e : es) {
      CAPTURE(e.name);
      if (e.name.rfind("ks_", 0) == 0) CHECK(e.pass);
    }
    auto no_curves = s;
    no_curves.trace_stride = 0;
    no_curves.n_samples = 2;
    CHECK_THROWS_AS(compare_he_sle(run_ensemble(no_curves), run_ensemble(no_curves)), Error);
  }

  TEST_CASE("parallel_for reports the lowest failing index") {
    std::vector<int> hit(10, 0);
    parallel_for(10, 3, [&](std::int64_t i) { hit[static_cast<std::size_t>(i)] += 1; });
    for (int h : hit) CHECK(h == 1);
    try {
      parallel_for(10, 3, [](std::int64_t i) {
        if (i == 4 || i == 7) throw Error("boom");
      });
      FAIL("no exception");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "sample 4: boom");
    }
  }

  TEST_CASE("configuration errors") {
    auto c = small_he();
    c.n_samples = 0;
    CHECK_THROWS_AS(run_ensemble(c), Error);
    c = small_he();
    c.checkpoints = {3.0};
    CHECK_THROWS_AS(run_ensemble(c), Error);
  }

  TEST_CASE("exact verifier on the tiny corpus") {
    VerifyOptions opt;
    opt.corpus = "tiny";
    opt.oracle = true;
    CHECK(verify_identities(opt).passed());
    opt.perturb = 1e-6;
    CHECK_FALSE(verify_identities(opt).passed());
  }

  TEST_CASE("unknown preset") {
    PresetOptions p;
    p.name = "nope";
    CHECK_THROWS_AS(run_preset(p), UsageError);
  }
}
