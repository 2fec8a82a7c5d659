#include "he/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "he/excursion.hpp"
#include "he/ks.hpp"
#include "he/oracle.hpp"
#include "he/rng.hpp"

namespace he {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

SolverConfig exact_solver() {
  SolverConfig c;
  c.method = SolverMethod::DirectSparse;
  return c;
}

int domain_scale(const LatticeDomain& d) {
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d.triangle_count())))));
}

// Each edge kept with probability 1/2; never empty unless `all` is.
std::vector<DirectedEdge> random_subset(const std::vector<DirectedEdge>& all, RandomStream& rng) {
  std::vector<DirectedEdge> out;
  for (const auto& e : all) {
    if (rng.next_uniform() < 0.5) out.push_back(e);
  }
  if (out.empty() && !all.empty()) out.push_back(all[rng.next_below(all.size())]);
  return out;
}

std::vector<DirectedEdge> reversed(const std::vector<DirectedEdge>& es) {
  std::vector<DirectedEdge> out;
  for (const auto& e : es) out.push_back(rev(e));
  return out;
}

std::vector<Vertex> random_killed(const LatticeDomain& d, RandomStream& rng, std::size_t max_count) {
  std::vector<Vertex> out;
  if (d.interior_count() < 3) return out;
  const std::size_t count = rng.next_below(max_count + 1);
  for (std::size_t k = 0; k < count; ++k) {
    const Vertex v = d.vertex(static_cast<int>(rng.next_below(d.interior_count())));
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  if (out.size() >= d.interior_count()) out.pop_back();
  return out;
}

// Running maximum of an identity error.
struct MaxError {
  double value = 0.0;
  std::int64_t cases = 0;
  void add(double e) {
    value = std::max(value, e);
    ++cases;
  }
};

TestEntry identity_entry(std::string name, std::string provenance, const MaxError& m, double tol, double perturb) {
  TestEntry e;
  e.name = std::move(name);
  e.provenance = std::move(provenance);
  e.statistic = m.value + perturb;
  e.expected = 0.0;
  e.tolerance = tol;
  e.pass = e.statistic <= tol;
  e.samples = m.cases;
  return e;
}

}  // namespace

std::vector<LatticeDomain> verify_corpus(const std::string& name, std::uint64_t seed) {
  std::vector<LatticeDomain> out;
  if (name == "default") {
    for (int k = 0; k < 10; ++k) {
      const int scale = 6 + (14 * k + 8) / 9;
      out.push_back(build_random_domain(scale, mix64(seed * 1000 + static_cast<std::uint64_t>(k))));
    }
  } else if (name == "tiny") {
    out.push_back(build_hexagon_domain(2));
    for (std::uint64_t k = 0; out.size() < 6 && k < 10000; ++k) {
      auto d = build_random_domain(3 + static_cast<int>(k % 3), mix64(seed * 7919 + k));
      if (d.interior_count() >= 2 && d.interior_count() <= 12) out.push_back(std::move(d));
    }
  } else {
    throw UsageError("unknown corpus '" + name + "'");
  }
  return out;
}

TestReport verify_identities(const VerifyOptions& opt) {
  const auto corpus = verify_corpus(opt.corpus, opt.seed);
  const SolverConfig cfg = exact_solver();
  TestReport report;
  report.seed = opt.seed;
  report.config = {{"suite", "verify"}, {"corpus", opt.corpus}, {"domains", corpus.size()}, {"oracle", opt.oracle}};
  if (opt.perturb != 0.0) report.config["perturb"] = opt.perturb;

  MaxError h_mart, full_visit, visit_vs_h, reversal, nu_mart, dirichlet;
  double min_energy_gap = std::numeric_limits<double>::infinity();
  std::int64_t energy_trials = 0;
  std::int64_t states = 0;
  const auto t0 = Clock::now();

  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto dp = std::make_shared<const LatticeDomain>(corpus[k]);
    const LatticeDomain& d = *dp;
    RandomStream rng(opt.seed, Purpose::TestData, k);
    const double scale = domain_scale(d);

    // Explorer states at n = 0, 1, 2, 3, 5, 7 of one seeded run.
    const auto e_minus = minus_arc_edges(d);
    ExplorerState s = init(dp, cfg);
    for (std::uint64_t n = 0; n <= 7 && !s.terminated(); ++n) {
      if (n != 4 && n != 6) {
        const Branch b = branch(s, cfg);
        double err = 0.0;
        for (std::size_t id = 0; id < d.vertex_count(); ++id) {
          const int i = static_cast<int>(id);
          const double mix = b.p * b.black.field().value(i) + (1.0 - b.p) * b.white.field().value(i);
          err = std::max(err, std::fabs(s.field().value(i) - mix));
        }
        h_mart.add(err);
        const MartingaleCheck m = nu_martingale_check(s, e_minus, cfg);
        nu_mart.add(std::fabs(m.lhs - m.rhs));
        ++states;
      }
      s = step(s, explorer_coin(opt.seed, k, n), cfg);
    }

    // Visit integrals with a few killed vertices.
    const auto killed = random_killed(d, rng, 2);
    const ExcursionSpec full = full_spec(dp, killed);
    const ExcursionSummary sum = summarize(full);
    const auto absorbing = absorbing_mask(d, killed);
    std::vector<int> free_ids;
    for (std::size_t id = 0; id < d.vertex_count(); ++id) {
      if (!absorbing[id]) {
        free_ids.push_back(static_cast<int>(id));
        full_visit.add(std::fabs(sum.visit_integrals[id] - 1.0));
      }
    }
    const EdgeSets sets = edge_sets(d, killed);
    for (int trial = 0; trial < 3 && !free_ids.empty(); ++trial) {
      ExcursionSpec spec = full;
      spec.e1 = random_subset(sets.e_out, rng);
      const Vertex v = d.vertex(free_ids[rng.next_below(free_ids.size())]);
      const auto back = reversed(spec.e1);
      visit_vs_h.add(std::fabs(visit_integral(spec, v) - harmonic_measure_edges(d, killed, v, back)));

      ExcursionSpec fwd = full;
      fwd.e1 = random_subset(sets.e_out, rng);
      fwd.e2 = random_subset(sets.e_in, rng);
      ExcursionSpec bwd = full;
      bwd.e1 = reversed(fwd.e2);
      bwd.e2 = reversed(fwd.e1);
      reversal.add(std::fabs(total_mass(fwd) - total_mass(bwd)));
    }

    // Dirichlet energy identity and the minimising property of h0.
    VertexFunction f(d.vertex_count());
    for (auto& x : f) x = 2.0 * rng.next_uniform() - 1.0;
    const auto lap = closure_laplacian(d, f);
    double pairing = 0.0;
    for (std::size_t id = 0; id < f.size(); ++id) pairing += f[id] * lap[id];
    dirichlet.add(std::fabs(dirichlet_energy(d, f) + pairing) / scale);

    std::vector<std::uint8_t> mask(d.vertex_count(), 0);
    VertexFunction data(d.vertex_count(), 0.0);
    for (std::size_t id = d.interior_count(); id < d.vertex_count(); ++id) {
      mask[id] = 1;
      data[id] = d.h0(static_cast<int>(id));
    }
    const HarmonicField g = harmonic_extension(dp, mask, data, cfg);
    const double eg = dirichlet_energy(d, g.values());
    for (int trial = 0; trial < 20; ++trial) {
      VertexFunction other = g.values();
      for (std::size_t id = 0; id < d.interior_count(); ++id) other[id] += 0.2 * (rng.next_uniform() - 0.5);
      min_energy_gap = std::min(min_energy_gap, (dirichlet_energy(d, other) - eg) / scale);
      ++energy_trials;
    }
  }

  report.add(identity_entry("h_one_step_martingale", "h_n(v) is a martingale: p h_black + (1-p) h_white = h_n",
                            h_mart, 1e-8, opt.perturb));
  TestEntry count;
  count.name = "explorer_states";
  count.provenance = "the one-step identity is checked on at least 20 states";
  count.statistic = static_cast<double>(states);
  count.expected = 20.0;
  count.pass = states >= 20;
  count.samples = states;
  report.add(count);
  report.add(identity_entry("visit_integral_full", "integral of n_v over the full excursion measure is 1", full_visit,
                            1e-9, opt.perturb));
  report.add(identity_entry("visit_integral_harmonic_measure", "integral of n_v over nu(D,E1) equals H(v, rev(E1))",
                            visit_vs_h, 1e-9, opt.perturb));
  report.add(identity_entry("reversal_total_mass", "|nu(D,E1,E2)| = |nu(D,rev(E2),rev(E1))| by path reversal",
                            reversal, 1e-9, opt.perturb));
  report.add(identity_entry("nu_one_step_martingale", "|nu_n| is a martingale", nu_mart, 1e-8, opt.perturb));
  TestEntry dir = identity_entry("dirichlet_identity", "E(f) = -sum f Laplacian(f) over the closed domain", dirichlet,
                                 1e-10, opt.perturb);
  dir.note = "error divided by the domain scale";
  report.add(dir);
  TestEntry minimiser;
  minimiser.name = "harmonic_minimiser";
  minimiser.provenance = "the harmonic extension minimises E among functions with the same boundary values";
  minimiser.statistic = min_energy_gap - opt.perturb;
  minimiser.expected = 0.0;
  minimiser.tolerance = 1e-10;
  minimiser.pass = minimiser.statistic >= -1e-10;
  minimiser.samples = energy_trials;
  minimiser.note = "smallest E(f) - E(h) over perturbations, divided by the domain scale";
  report.add(minimiser);
  for (auto& e : report.entries) e.runtime_s = seconds_since(t0);

  if (opt.oracle) {
    const auto t1 = Clock::now();
    auto extra = oracle_checks(opt.seed, opt.perturb);
    for (auto& e : extra) e.runtime_s = seconds_since(t1);
    report.append(extra);
  }
  return report;
}

std::vector<TestEntry> oracle_checks(std::uint64_t seed, double perturb) {
  const auto corpus = verify_corpus("tiny", seed);
  MaxError mass, visits, hm;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto dp = std::make_shared<const LatticeDomain>(corpus[k]);
    const LatticeDomain& d = *dp;
    RandomStream rng(seed, Purpose::TestData, 1000 + k);
    const auto killed = random_killed(d, rng, 1);
    const WalkOracle oracle(d, killed);
    const EdgeSets sets = edge_sets(d, killed);
    const ExcursionSpec full = full_spec(dp, killed);
    const auto absorbing = absorbing_mask(d, killed);
    const auto exits = exit_edges(d, killed);
    for (int trial = 0; trial < 4; ++trial) {
      ExcursionSpec spec = full;
      spec.e1 = random_subset(sets.e_out, rng);
      spec.e2 = random_subset(sets.e_in, rng);
      mass.add(std::fabs(total_mass(spec) - oracle.total_mass(spec.e1, spec.e2)));
      ExcursionSpec vspec = full;
      vspec.e1 = random_subset(sets.e_out, rng);
      const auto edges = random_subset(exits, rng);
      for (std::size_t id = 0; id < d.vertex_count(); ++id) {
        if (absorbing[id]) continue;
        const Vertex v = d.vertex(static_cast<int>(id));
        visits.add(std::fabs(visit_integral(vspec, v) - oracle.visit_integral(vspec.e1, v)));
        hm.add(std::fabs(harmonic_measure_edges(d, killed, v, edges) - oracle.harmonic_measure(v, edges)));
      }
    }
  }
  std::vector<TestEntry> out;
  out.push_back(identity_entry("oracle_total_mass", "agreement with the fundamental-matrix walk summation", mass,
                               1e-10, perturb));
  out.push_back(identity_entry("oracle_visit_integral", "agreement with the fundamental-matrix walk summation", visits,
                               1e-10, perturb));
  out.push_back(identity_entry("oracle_harmonic_measure", "agreement with the fundamental-matrix walk summation", hm,
                               1e-10, perturb));
  return out;
}

std::vector<Vertex> martingale_probes(const LatticeDomain& d, const VertexFunction& h0) {
  const double axis = d.v_start().position().real();
  double top = 0.0;
  for (const auto& v : d.vertices()) top = std::max(top, embed(v).imag());
  const Complex centre(axis, 0.5 * (d.v_start().position().imag() + top));
  int on_axis = -1, near_plus = -1, quarter = -1;
  double best_axis = 1e300, best_plus = 1e300, best_quarter = 1e300;
  for (std::size_t id = 0; id < d.interior_count(); ++id) {
    const int i = static_cast<int>(id);
    const Complex p = embed(d.vertex(i));
    const double gap = std::fabs(p.real() - axis) < 1e-9 ? std::abs(p - centre) : 1e300;
    if (gap < best_axis) {
      best_axis = gap;
      on_axis = i;
    }
    bool touches_plus = false;
    for (int nb : d.neighbors(i)) touches_plus = touches_plus || (nb >= 0 && d.is_boundary(nb) && d.h0(nb) == 1);
    if (touches_plus && std::fabs(h0[id] - 0.95) < best_plus) {
      best_plus = std::fabs(h0[id] - 0.95);
      near_plus = i;
    }
    if (std::fabs(h0[id] - 0.25) < best_quarter) {
      best_quarter = std::fabs(h0[id] - 0.25);
      quarter = i;
    }
  }
  if (on_axis < 0 || near_plus < 0 || quarter < 0) throw Error("domain too small for martingale probes");
  return {d.vertex(on_axis), d.vertex(near_plus), d.vertex(quarter)};
}

namespace {

struct PresetContext {
  const PresetOptions& opt;
  TestReport& report;

  int scale(int fallback) const { return opt.scale > 0 ? opt.scale : fallback; }
  std::int64_t samples(std::int64_t fallback) const { return opt.samples > 0 ? opt.samples : fallback; }

  SampleStore ensemble(EnsembleConfig cfg, const std::string& label) {
    cfg.master_seed = opt.seed;
    cfg.jobs = opt.jobs;
    SampleStore store = run_ensemble(cfg);
    report.config["ensembles"][label] = cfg.to_json();
    if (!opt.out_dir.empty()) {
      std::filesystem::create_directories(opt.out_dir);
      std::ofstream os(std::filesystem::path(opt.out_dir) / ("samples_" + label + ".csv"));
      write_store_csv(os, store);
      if (!os) throw Error("cannot write sample CSV in " + opt.out_dir);
    }
    return store;
  }

  void add(std::vector<TestEntry> es, const std::string& prefix, Clock::time_point t0, bool gated = true) {
    const double rt = seconds_since(t0);
    for (auto& e : es) {
      e.name = prefix + e.name;
      e.runtime_s = rt;
      e.gated = e.gated && gated;
      report.add(std::move(e));
    }
  }
};

EnsembleConfig sle_control_config(std::int64_t samples) {
  EnsembleConfig c;
  c.process = Process::Sle;
  c.n_samples = samples;
  c.kappa = 4.0;
  c.dt = 1e-4;
  c.horizon_T = 1.0;
  c.checkpoints = {0.25, 0.5, 1.0};
  c.angle_times = {0.0, 0.25, 0.5};
  c.angle_point = Complex(0.0, 2.0);
  return c;
}

void preset_sle_control(PresetContext& ctx, const std::string& prefix) {
  const auto t0 = Clock::now();
  const auto store = ctx.ensemble(sle_control_config(ctx.samples(2000)), prefix.empty() ? "sle" : "control_sle");
  ctx.add(test_driving_bm(store), prefix, t0);
  ctx.add(test_angle_martingale(store), prefix, t0);
}

double horizon_for(int scale) { return static_cast<double>(scale) * scale / 1e4; }

EnsembleConfig lattice_driving_config(Process p, int scale, std::int64_t samples) {
  EnsembleConfig c;
  c.process = p;
  c.domain = box_spec(scale);
  c.n_samples = samples;
  c.horizon_T = horizon_for(scale);
  const double T = c.horizon_T;
  c.checkpoints = {T / 8.0, T / 4.0, T / 2.0, T};
  // Same resolution relative to the horizon at every scale.
  c.dt_max = 1e-3 * T;
  return c;
}

// Rescales lattice curves by `factor`; capacities scale by its square.
SampleStore rescaled(SampleStore store, double factor) {
  for (auto& s : store.samples) {
    for (auto& z : s.curve) z *= factor;
    for (auto& t : s.curve_t) t *= factor * factor;
    s.capacity *= factor * factor;
  }
  return store;
}

// HE driving band at the full scale; the half scale and the percolation
// comparator are measured on the same checkpoints.
void preset_he_vs_bm(PresetContext& ctx) {
  const int S = ctx.scale(200);
  const std::int64_t M = ctx.samples(2000);
  if (S < 8) throw UsageError("he-vs-bm needs --scale of at least 8");
  ctx.report.config["scale"] = S;
  preset_sle_control(ctx, "control: ");
  DrivingTolerances he_tol;
  he_tol.var = 0.15;
  he_tol.qv = 0.15;
  ctx.report.config["he_var_band"] = {4.0 * (1.0 - he_tol.var), 4.0 * (1.0 + he_tol.var)};

  auto run_scale = [&](int scale, bool gated_band) {
    const auto t0 = Clock::now();
    const auto store = ctx.ensemble(lattice_driving_config(Process::HarmonicExplorer, scale, M),
                                    "he_scale" + std::to_string(scale));
    auto entries = test_driving_bm(store, he_tol);
    for (auto& e : entries) {
      const bool is_mean = e.name.rfind("mean_W", 0) == 0;
      const bool at_horizon = e.name.find("(" + fmt(store.config.horizon_T) + ")") != std::string::npos;
      e.gated = at_horizon && (is_mean || (gated_band && e.name.rfind("var_W", 0) == 0));
    }
    ctx.add(entries, "he scale " + std::to_string(scale) + ": ", t0);
    return variance_ratio(store, store.config.checkpoints.size() - 1);
  };
  const double small = run_scale(S / 2, false);
  const double large = run_scale(S, true);

  TestEntry decay;
  decay.name = "var_deviation_decreases(scale " + std::to_string(S / 2) + " -> " + std::to_string(S) + ")";
  decay.provenance = "W(t/4) converges in law to Brownian motion as the scale grows";
  decay.statistic = std::fabs(large - 4.0);
  decay.expected = std::fabs(small - 4.0);
  decay.pass = decay.statistic < decay.expected;
  decay.samples = M;
  decay.note = "statistic and expected are |Var W(T)/T - 4| at the larger and smaller scale";
  ctx.report.add(decay);

  const auto t0 = Clock::now();
  const auto perc = ctx.ensemble(lattice_driving_config(Process::Percolation, S, M), "percolation_scale" + std::to_string(S));
  const double pv = variance_ratio(perc, perc.config.checkpoints.size() - 1);
  auto pentries = test_driving_bm(perc, he_tol);
  for (auto& e : pentries) e.gated = false;
  ctx.add(pentries, "percolation scale " + std::to_string(S) + ": ", t0, false);

  TestEntry exceeds;
  exceeds.name = "percolation_var_exceeds_he(scale " + std::to_string(S) + ")";
  exceeds.provenance = "percolation interfaces tend to SLE(6), the harmonic explorer to SLE(4)";
  exceeds.statistic = pv;
  exceeds.expected = large;
  exceeds.pass = pv > large;
  exceeds.samples = M;
  exceeds.note = "statistic: percolation Var W(T)/T; expected: harmonic explorer Var W(T)/T";
  exceeds.runtime_s = seconds_since(t0);
  ctx.report.add(exceeds);
  TestEntry closer = exceeds;
  closer.name = "he_closer_to_4(scale " + std::to_string(S) + ")";
  closer.statistic = std::fabs(large - 4.0);
  closer.expected = std::fabs(pv - 4.0);
  closer.pass = closer.statistic < closer.expected;
  closer.note = "statistic: |HE ratio - 4|; expected: |percolation ratio - 4|";
  ctx.report.add(closer);
}

void preset_h_martingale(PresetContext& ctx) {
  const int S = ctx.scale(40);
  const auto t0 = Clock::now();
  EnsembleConfig c;
  c.process = Process::HarmonicExplorer;
  c.domain = box_spec(S);
  c.n_samples = ctx.samples(10000);
  c.horizon_T = 0.0;
  c.green_window = 0.0;
  const auto dp = std::make_shared<const LatticeDomain>(c.domain.build());
  const GreenCache cache(dp, -1.0);
  c.probes = martingale_probes(*dp, cache.h0());
  const auto store = ctx.ensemble(c, "he_terminal");
  std::vector<TestEntry> out;
  for (std::size_t k = 0; k < c.probes.size(); ++k) {
    out.push_back(test_h_martingale(store, k, cache.h0()[static_cast<std::size_t>(dp->id_of(c.probes[k]))]));
  }
  ctx.add(out, "", t0);
}

void preset_profile(PresetContext& ctx) {
  const int S = ctx.scale(200);
  const auto t0 = Clock::now();
  ctx.report.config["scale"] = S;
  ctx.report.config["threshold"] = 0.05;
  SolverConfig cfg = exact_solver();
  auto entries = test_harmonic_profile(S, 0.05, cfg);

  // A vertex next to the 1-coloured arc, right of the marked edge.
  const auto dp = std::make_shared<const LatticeDomain>(box_spec(S).build());
  std::vector<std::uint8_t> mask(dp->vertex_count(), 0);
  VertexFunction data(dp->vertex_count(), 0.0);
  for (std::size_t id = dp->interior_count(); id < dp->vertex_count(); ++id) {
    mask[id] = 1;
    data[id] = dp->h0(static_cast<int>(id));
  }
  const HarmonicField h = harmonic_extension(dp, mask, data, cfg);
  const int reach = static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(S))));
  const Vertex base = dp->v_start().second();
  for (int side : {1, -1}) {
    const Vertex v{base.a + side * reach, base.b + 1};
    const int id = dp->id_of(v);
    if (id < 0 || !dp->is_interior(id)) continue;
    bool plus = false;
    for (int nb : dp->neighbors(id)) plus = plus || (nb >= 0 && dp->is_boundary(nb) && dp->h0(nb) == 1);
    if (!plus) continue;
    const Complex z = to_half_plane(*dp, embed(v));
    const double model = 1.0 - std::atan2(z.imag(), z.real()) / std::numbers::pi;
    TestEntry e;
    e.name = "profile_next_to_plus_arc";
    e.provenance = "boundary values: h0 and the half-plane profile are both near 1 next to the 1-coloured arc";
    e.statistic = std::max(1.0 - h.value(id), 1.0 - model);
    e.expected = 0.0;
    e.tolerance = 0.1;
    e.pass = e.statistic <= 0.1;
    e.samples = 1;
    e.note = "largest distance from 1 of h0 and of the model value";
    entries.push_back(e);
    break;
  }
  ctx.add(entries, "", t0);
}

void preset_hitting(PresetContext& ctx) {
  const int S = ctx.scale(40);
  const std::int64_t M = ctx.samples(4000);
  const auto t0 = Clock::now();
  const DomainSpec spec = box_spec(S);
  const auto d = spec.build();
  const double height = std::sqrt(3.0) / 2.0 * S;
  const Complex z = d.v_start().position() + Complex(0.375 * S, 0.5 * height);
  const double R = 0.3 * S;
  const std::vector<double> radii{R / 2.0, R / 4.0, R / 8.0};
  ctx.report.config["hitting"] = {{"domain", spec.to_json()}, {"z", {z.real(), z.imag()}}, {"R", R}, {"radii", radii},
                                  {"samples", M}};
  const auto est = estimate_hit_probability(spec, z, radii, R, M, ctx.opt.seed, ctx.opt.jobs);
  std::vector<TestEntry> out;
  for (const auto& h : est) {
    TestEntry e;
    e.name = "hit_frequency(r/R " + fmt(h.r / R) + ")";
    e.provenance = "P[path meets B(z,r)] <= O(1) (r/R)^c";
    e.statistic = h.frequency;
    e.tolerance = h.standard_error;
    e.pass = true;
    e.gated = false;
    e.samples = h.samples;
    out.push_back(e);
  }
  if (!ctx.opt.out_dir.empty()) {
    std::filesystem::create_directories(ctx.opt.out_dir);
    std::ofstream os(std::filesystem::path(ctx.opt.out_dir) / "hitting.csv");
    os << "r,r_over_R,frequency,standard_error,samples\n";
    os.precision(17);
    for (const auto& h : est) os << h.r << ',' << h.r / R << ',' << h.frequency << ',' << h.standard_error << ',' << h.samples << '\n';
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < est.size(); ++k) decreasing = decreasing && est[k].frequency < est[k - 1].frequency;
  TestEntry mono;
  mono.name = "hit_strictly_decreasing_in_r";
  mono.provenance = "event inclusion: B(z,r) grows with r";
  mono.statistic = decreasing ? 1.0 : 0.0;
  mono.expected = 1.0;
  mono.pass = decreasing;
  mono.samples = M;
  out.push_back(mono);
  // Slope of log frequency against log(R/r) is -exponent.
  const double exponent = hit_exponent(est, R);
  TestEntry neg;
  neg.name = "hit_loglog_slope_negative";
  neg.provenance = "P[path meets B(z,r)] <= O(1) (r/R)^c with c > 0";
  neg.statistic = exponent;
  neg.expected = 0.0;
  neg.pass = exponent > 0.0;
  neg.samples = M;
  neg.note = "statistic is the fitted exponent c, minus the log-log slope as r shrinks; its value is not asserted";
  out.push_back(neg);
  ctx.add(out, "", t0);
}

std::vector<Complex> alpha_curve(double eps, double top) {
  std::vector<Complex> pts;
  for (int j = 1;; ++j) {
    const Complex a(0.0, eps * (1.0 - 1.0 / j));
    const Complex b(j % 2 == 1 ? eps : -eps, eps * j);
    if (j > 1) pts.push_back(a);
    else pts.emplace_back(0.0, 0.0);
    pts.push_back(b);
    if (b.imag() > top) break;
  }
  return pts;
}

// sup |W| over [0, cap] for the zigzag path of parameter eps.
double alpha_sup(double eps, double cap) {
  const auto pts = alpha_curve(eps, 4.0 * std::sqrt(cap) + 1.0);
  // The returns to the axis sit in ever narrower fjords whose images lie
  // far below the default collapse guard.
  ExtractionConfig cfg;
  cfg.min_height = std::numeric_limits<double>::min();
  DrivingExtractor ex(cfg);
  for (std::size_t k = 1; k < pts.size() && ex.capacity() < cap; ++k) ex.push(pts[k]);
  if (ex.capacity() < cap) throw Error("zigzag fixture too short");
  // Slits at the returns add capacity below the resolution of t, so the sup is
  // taken over the slit list rather than a DrivingFunction.
  double sup = 0.0, t = 0.0;
  for (const auto& s : ex.slits()) {
    if (t > cap) break;
    sup = std::max(sup, std::fabs(s.w));
    t += s.dt;
  }
  return sup;
}

void preset_extraction(PresetContext& ctx) {
  const auto t0 = Clock::now();
  std::vector<TestEntry> out;

  HCurve seg;
  for (int k = 0; k <= 100; ++k) seg.points.emplace_back(0.0, k / 100.0);
  const auto dv = extract_driving(seg);
  double wmax = 0.0;
  for (double w : dv.w()) wmax = std::max(wmax, std::fabs(w));
  TestEntry flat;
  flat.name = "vertical_segment_W";
  flat.provenance = "a vertical slit is driven by the constant 0";
  flat.statistic = wmax;
  flat.tolerance = 1e-6;
  flat.pass = wmax <= 1e-6;
  flat.samples = 1;
  out.push_back(flat);
  TestEntry cap = flat;
  cap.name = "vertical_segment_capacity";
  cap.provenance = "a vertical slit of height y has capacity y^2/4";
  cap.statistic = dv.total_capacity();
  cap.expected = 0.25;
  cap.tolerance = 1e-4;
  cap.pass = std::fabs(dv.total_capacity() - 0.25) <= 1e-4;
  out.push_back(cap);

  const std::vector<double> eps{0.2, 0.1, 0.05};
  std::vector<double> sups;
  for (double e : eps) sups.push_back(alpha_sup(e, 0.2));
  for (std::size_t k = 0; k < eps.size(); ++k) {
    TestEntry e;
    e.name = "zigzag_sup_W(eps " + fmt(eps[k]) + ")";
    e.provenance = "the driving process of the zigzag path tends to 0 locally uniformly";
    e.statistic = sups[k];
    e.samples = 1;
    e.pass = true;
    e.gated = false;
    if (eps[k] == 0.1) {
      e.tolerance = 0.15;
      e.pass = sups[k] <= 0.15;
      e.note = "reported only: the first corner alone already gives W = 2.31 sqrt(t) > 0.12";
    }
    out.push_back(e);
  }
  TestEntry dec;
  dec.name = "zigzag_sup_W_decreasing";
  dec.provenance = "the driving process of the zigzag path tends to 0 locally uniformly";
  dec.statistic = sups.back();
  dec.expected = sups.front();
  dec.pass = sups[1] < sups[0] && sups[2] < sups[1];
  dec.samples = static_cast<std::int64_t>(eps.size());
  dec.note = "sup over capacity [0, 0.2] for eps = 0.2, 0.1, 0.05";
  out.push_back(dec);

  const double kappa = 4.0, T = 0.5, dt = 1e-4;
  const SlePath sp = sle_path(kappa, dt, T, ctx.opt.seed, 0, 1);
  const auto back = extract_driving(sp.trace.curve);
  double err = 0.0;
  const auto& t = sp.driving.t();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    err = std::max(err, std::fabs(back.value_at(0.5 * (t[k] + t[k + 1])) - sp.driving.w()[k]));
  }
  TestEntry rt;
  rt.name = "round_trip_sup_error";
  rt.provenance = "extraction inverts trace generation";
  rt.statistic = err;
  rt.tolerance = 0.02 * std::sqrt(kappa * T);
  rt.pass = err <= rt.tolerance;
  rt.samples = 1;
  out.push_back(rt);
  ctx.report.config["extraction"] = {{"round_trip", {{"kappa", kappa}, {"T", T}, {"dt", dt}}},
                                     {"zigzag_capacity", 0.2},
                                     {"zigzag_eps", eps}};
  ctx.add(out, "", t0);
}

void preset_he_vs_sle(PresetContext& ctx) {
  const int S = ctx.scale(200);
  const std::int64_t M = ctx.samples(500);
  if (S < 8) throw UsageError("he-vs-sle needs --scale of at least 8");
  // Lattice paths at scale s are stopped at capacity (s/100)^2 and shrunk by
  // 100/s, so every ensemble is compared on [0, 1].
  const double T = 1.0;
  CompareOptions opt;
  opt.t_grid = {T / 4.0, T / 2.0, T};
  opt.return_t0 = {T / 4.0, T / 2.0};
  ctx.report.config["compare"] = {{"t_grid", opt.t_grid}, {"return_t0", opt.return_t0},
                                  {"return_radius", opt.return_radius}, {"ks_level", opt.ks_level},
                                  {"unit_scale", 100}};
  const auto t0 = Clock::now();
  EnsembleConfig sc = sle_control_config(M);
  sc.horizon_T = T;
  sc.checkpoints = {T};
  sc.angle_times.clear();
  sc.trace_stride = 100;
  const auto sle = ctx.ensemble(sc, "sle_traces");
  std::vector<std::vector<TestEntry>> per_scale;
  for (int scale : {S / 2, S}) {
    EnsembleConfig c = lattice_driving_config(Process::HarmonicExplorer, scale, M);
    c.checkpoints = {c.horizon_T};
    c.keep_paths = true;
    const auto he = rescaled(ctx.ensemble(c, "he_paths_scale" + std::to_string(scale)), 100.0 / scale);
    auto entries = compare_he_sle(he, sle, opt);
    for (auto& e : entries) e.gated = false;
    per_scale.push_back(entries);
    ctx.add(entries, "scale " + std::to_string(scale) + ": ", t0, false);
  }
  for (std::size_t k = 0; k < per_scale[0].size(); ++k) {
    const auto& a = per_scale[0][k];
    const auto& b = per_scale[1][k];
    if (a.name.rfind("ks_", 0) != 0) continue;
    TestEntry e;
    e.name = "ks_improves:" + a.name;
    e.provenance = "the law of the rescaled path tends to the law of the SLE(4) path";
    e.statistic = b.statistic;
    e.expected = a.statistic;
    e.pass = b.statistic < a.statistic;
    e.samples = b.samples;
    e.note = "KS distance at the larger scale against the smaller scale";
    e.runtime_s = seconds_since(t0);
    ctx.report.add(e);
  }
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"sle4-control", "he-vs-bm",   "h-martingale", "profile",
                                              "hitting",      "extraction", "he-vs-sle"};
  return names;
}

TestReport run_preset(const PresetOptions& opt) {
  TestReport report;
  report.seed = opt.seed;
  report.config = {{"suite", "stats"}, {"preset", opt.name}};
  if (opt.scale > 0) report.config["scale_flag"] = opt.scale;
  if (opt.samples > 0) report.config["samples_flag"] = opt.samples;
  PresetContext ctx{opt, report};
  if (opt.name == "sle4-control") {
    preset_sle_control(ctx, "");
  } else if (opt.name == "he-vs-bm") {
    preset_he_vs_bm(ctx);
  } else if (opt.name == "h-martingale") {
    preset_h_martingale(ctx);
  } else if (opt.name == "profile") {
    preset_profile(ctx);
  } else if (opt.name == "hitting") {
    preset_hitting(ctx);
  } else if (opt.name == "extraction") {
    preset_extraction(ctx);
  } else if (opt.name == "he-vs-sle") {
    preset_he_vs_sle(ctx);
  } else {
    throw UsageError("unknown preset '" + opt.name + "'");
  }
  return report;
}

}  // namespace he
