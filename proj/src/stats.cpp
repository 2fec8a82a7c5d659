#include "he/stats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>

#include "he/ks.hpp"

namespace he {

namespace {

double segment_distance(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  double s = len2 > 0.0 ? ((z - a) * std::conj(ab)).real() / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(z - (a + s * ab));
}

double polyline_distance(Complex z, const std::vector<Complex>& path) {
  double best = std::abs(z - path.front());
  for (std::size_t i = 1; i < path.size(); ++i) best = std::min(best, segment_distance(z, path[i - 1], path[i]));
  return best;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

void parallel_for(std::int64_t n, int jobs, const std::function<void(std::int64_t)>& fn) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::int64_t>(n, 1))));
  std::vector<std::int64_t> failed(static_cast<std::size_t>(jobs), -1);
  std::vector<std::string> messages(static_cast<std::size_t>(jobs));
  auto worker = [&](int j) {
    for (std::int64_t i = j; i < n; i += jobs) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        failed[static_cast<std::size_t>(j)] = i;
        messages[static_cast<std::size_t>(j)] = e.what();
        return;
      }
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker, j);
    for (auto& t : pool) t.join();
  }
  std::int64_t first = -1;
  std::string msg;
  for (std::size_t j = 0; j < failed.size(); ++j) {
    if (failed[j] >= 0 && (first < 0 || failed[j] < first)) {
      first = failed[j];
      msg = messages[j];
    }
  }
  if (first >= 0) throw Error("sample " + std::to_string(first) + ": " + msg);
}

LatticeDomain DomainSpec::build() const {
  switch (kind) {
    case Kind::Box: return build_box_domain(width, height, offset);
    case Kind::Hexagon: return build_hexagon_domain(radius);
    case Kind::Random: return build_random_domain(scale, seed);
    case Kind::File: return load_domain(path);
  }
  throw Error("unknown domain kind");
}

nlohmann::json DomainSpec::to_json() const {
  switch (kind) {
    case Kind::Box: {
      nlohmann::json j = {{"kind", "box"}, {"width", width}, {"height", height}};
      if (offset) j["offset"] = *offset;
      return j;
    }
    case Kind::Hexagon: return {{"kind", "hexagon"}, {"radius", radius}};
    case Kind::Random: return {{"kind", "random"}, {"scale", scale}, {"seed", seed}};
    case Kind::File: return {{"kind", "file"}, {"path", path}};
  }
  return {};
}

DomainSpec box_spec(int scale) {
  DomainSpec s;
  s.kind = DomainSpec::Kind::Box;
  s.width = 2 * scale;
  s.height = scale;
  return s;
}

Complex to_half_plane(const LatticeDomain& d, Complex z) { return z - d.v_start().position(); }

nlohmann::json EnsembleConfig::to_json() const {
  const char* names[] = {"harmonic-explorer", "percolation", "sle"};
  nlohmann::json probes_j = nlohmann::json::array();
  for (const auto& v : probes) probes_j.push_back({v.a, v.b});
  nlohmann::json j = {{"process", names[static_cast<int>(process)]},
                      {"samples", n_samples},
                      {"master_seed", master_seed},
                      {"horizon_T", horizon_T},
                      {"checkpoints", checkpoints},
                      {"probes", probes_j},
                      {"dt_max", dt_max}};
  if (process == Process::Sle) {
    j["kappa"] = kappa;
    j["dt"] = dt;
    j["trace_stride"] = trace_stride;
    j["angle_times"] = angle_times;
    j["angle_point"] = {angle_point.real(), angle_point.imag()};
  } else {
    j["domain"] = domain.to_json();
    j["green_window"] = green_window;
  }
  return j;
}

SampleStore run_ensemble(const EnsembleConfig& cfg) {
  if (cfg.n_samples < 1) throw Error("ensemble: n_samples must be at least 1");
  if (cfg.horizon_T < 0.0 || (cfg.process == Process::Sle && !(cfg.horizon_T > 0.0))) {
    throw Error("ensemble: horizon must be positive");
  }
  for (double t : cfg.checkpoints) {
    if (cfg.horizon_T > 0.0 && t > cfg.horizon_T) throw Error("ensemble: checkpoint beyond the horizon");
  }
  SampleStore store;
  store.config = cfg;
  store.samples.resize(static_cast<std::size_t>(cfg.n_samples));

  if (cfg.process == Process::Sle) {
    parallel_for(cfg.n_samples, cfg.jobs, [&](std::int64_t i) {
      Sample& s = store.samples[static_cast<std::size_t>(i)];
      const auto drv = brownian_driving(cfg.kappa, cfg.dt, cfg.horizon_T, cfg.master_seed, static_cast<std::uint64_t>(i));
      s.steps = drv.slit_count();
      s.capacity = drv.total_capacity();
      for (double t : cfg.checkpoints) s.w_at.push_back(drv.value_at(t));
      if (!cfg.angle_times.empty()) s.angle_values = angle_observable(drv, cfg.angle_times, cfg.angle_point);
      if (cfg.trace_stride > 0) {
        auto tr = trace_of(drv, cfg.trace_stride);
        s.curve = std::move(tr.curve.points);
        s.curve_t = std::move(tr.t);
      }
    });
    return store;
  }

  const auto domain = std::make_shared<const LatticeDomain>(cfg.domain.build());
  std::unique_ptr<GreenCache> cache;
  if (cfg.process == Process::HarmonicExplorer) cache = std::make_unique<GreenCache>(domain, cfg.green_window);
  const Complex origin = domain->v_start().position();

  parallel_for(cfg.n_samples, cfg.jobs, [&](std::int64_t i) {
    Sample& s = store.samples[static_cast<std::size_t>(i)];
    std::optional<DrivingExtractor> ex;
    std::size_t pushed = 1;
    StopRule stop;
    if (cfg.horizon_T > 0.0) {
      ex.emplace(ExtractionConfig{cfg.dt_max});
      stop = [&](const ExplorerWalk& w) {
        const auto& p = w.path();
        for (; pushed < p.size(); ++pushed) ex->push(p[pushed] - origin);
        return ex->capacity() >= cfg.horizon_T;
      };
    }
    const auto index = static_cast<std::uint64_t>(i);
    PathSample ps = cfg.process == Process::HarmonicExplorer
                        ? sample_he(*cache, cfg.master_seed, index, cfg.probes, stop)
                        : sample_percolation(*domain, cfg.master_seed, index, cfg.probes, stop);
    s.steps = ps.log.size();
    s.terminated = ps.terminated;
    s.probe_values = std::move(ps.probe_values);
    if (ex) {
      s.capacity = ex->capacity();
      const auto drv = ex->driving();
      for (double t : cfg.checkpoints) s.w_at.push_back(drv.value_at(t));
    }
    if (cfg.keep_paths) {
      const std::size_t keep = ex ? pushed : ps.path.size();
      for (std::size_t k = 0; k < keep; ++k) s.curve.push_back(ps.path[k] - origin);
      if (ex) {
        s.curve_t.push_back(0.0);
        s.curve_t.insert(s.curve_t.end(), ex->point_capacity().begin(), ex->point_capacity().end());
      }
    }
  });
  return store;
}

void write_store_csv(std::ostream& os, const SampleStore& store) {
  const auto& cfg = store.config;
  os << "index,steps,terminated,capacity";
  for (double t : cfg.checkpoints) os << ",W(" << t << ')';
  for (const auto& v : cfg.probes) os << ",h(" << v.a << ' ' << v.b << ')';
  for (double t : cfg.angle_times) os << ",angle(" << t << ')';
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < store.samples.size(); ++i) {
    const auto& s = store.samples[i];
    os << i << ',' << s.steps << ',' << (s.terminated ? 1 : 0) << ',' << s.capacity;
    for (double x : s.w_at) os << ',' << x;
    for (double x : s.probe_values) os << ',' << x;
    for (double x : s.angle_values) os << ',' << x;
    os << '\n';
  }
}

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(xs.size() - 1);
  }
  return m;
}

TestEntry test_h_martingale(const SampleStore& store, std::size_t probe, double h0) {
  const auto M = static_cast<double>(store.samples.size());
  double hits = 0.0;
  for (const auto& s : store.samples) {
    if (!s.terminated) throw Error("h-martingale test needs samples run to termination");
    if (s.probe_values.at(probe) > 0.5) hits += 1.0;
  }
  const auto& v = store.config.probes.at(probe);
  TestEntry e;
  e.name = "terminal_colour(" + std::to_string(v.a) + " " + std::to_string(v.b) + ")";
  e.provenance = "h_n(v) is a martingale; optional stopping gives E[h_N(v)] = h_0(v)";
  e.statistic = hits / M;
  e.expected = h0;
  e.tolerance = 3.0 * std::sqrt(h0 * (1.0 - h0) / M);
  e.pass = std::fabs(e.statistic - h0) <= e.tolerance;
  e.samples = static_cast<std::int64_t>(M);
  return e;
}

double variance_ratio(const SampleStore& store, std::size_t checkpoint) {
  std::vector<double> w;
  for (const auto& s : store.samples) w.push_back(s.w_at.at(checkpoint));
  return moments(w).variance / store.config.checkpoints.at(checkpoint);
}

std::vector<TestEntry> test_driving_bm(const SampleStore& store, const DrivingTolerances& tol) {
  const auto& cps = store.config.checkpoints;
  if (cps.empty()) throw Error("driving test: no checkpoints");
  const double last = *std::max_element(cps.begin(), cps.end());
  for (std::size_t i = 0; i < store.samples.size(); ++i) {
    if (store.samples[i].capacity < last) {
      throw Error("driving test: sample " + std::to_string(i) + " is shorter than the horizon");
    }
  }
  const auto M = store.samples.size();
  std::vector<TestEntry> out;
  for (std::size_t k = 0; k < cps.size(); ++k) {
    std::vector<double> w;
    for (const auto& s : store.samples) w.push_back(s.w_at[k]);
    const Moments m = moments(w);
    TestEntry mean;
    mean.name = "mean_W(" + fmt(cps[k]) + ")";
    mean.provenance = "E[W(t_m) - W(t_n) | past] = O(delta^3): W has no drift";
    mean.statistic = m.mean;
    mean.expected = 0.0;
    mean.tolerance = 3.0 * std::sqrt(m.variance / static_cast<double>(M));
    mean.pass = std::fabs(m.mean) <= mean.tolerance;
    mean.samples = static_cast<std::int64_t>(M);
    out.push_back(mean);

    TestEntry var;
    var.name = "var_W(" + fmt(cps[k]) + ")/t";
    var.provenance = "Var W(t) = 4t for the limit SLE(4) driving function";
    var.statistic = m.variance / cps[k];
    var.expected = 4.0;
    var.tolerance = 4.0 * tol.var;
    var.pass = std::fabs(var.statistic - 4.0) <= var.tolerance;
    var.samples = static_cast<std::int64_t>(M);
    out.push_back(var);
  }

  std::vector<double> grid{0.0};
  grid.insert(grid.end(), cps.begin(), cps.end());
  std::vector<double> normalised;
  double qv = 0.0;
  for (const auto& s : store.samples) {
    double prev = 0.0;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      const double dw = s.w_at[k] - prev;
      normalised.push_back(dw / std::sqrt(4.0 * (grid[k + 1] - grid[k])));
      qv += dw * dw;
      prev = s.w_at[k];
    }
  }
  const KsResult ks = ks_normal(normalised);
  TestEntry kse;
  kse.name = "ks_normal_increments";
  kse.provenance = "t -> W(t/4) converges in law to standard Brownian motion";
  kse.statistic = ks.p_value;
  kse.expected = tol.ks_level;
  kse.tolerance = ks.d;
  kse.pass = ks.p_value > tol.ks_level;
  kse.samples = static_cast<std::int64_t>(normalised.size());
  kse.note = "statistic is the p-value, tolerance column holds the KS distance";
  out.push_back(kse);

  TestEntry q;
  q.name = "quadratic_variation/T";
  q.provenance = "4 E[t_m - t_n | past] = E[(W(t_m) - W(t_n))^2 | past] + O(delta^3)";
  q.statistic = qv / static_cast<double>(M) / grid.back();
  q.expected = 4.0;
  q.tolerance = 4.0 * tol.qv;
  q.pass = std::fabs(q.statistic - 4.0) <= q.tolerance;
  q.samples = static_cast<std::int64_t>(M);
  out.push_back(q);
  return out;
}

std::vector<TestEntry> test_angle_martingale(const SampleStore& store) {
  const auto& times = store.config.angle_times;
  if (times.empty()) throw Error("angle test: no observation times");
  const auto M = store.samples.size();
  std::vector<std::vector<double>> cols(times.size());
  for (const auto& s : store.samples) {
    for (std::size_t j = 0; j < times.size(); ++j) cols[j].push_back(s.angle_values.at(j));
  }
  const double base = moments(cols[0]).mean;
  std::vector<TestEntry> out;
  for (std::size_t j = 1; j < times.size(); ++j) {
    const Moments m = moments(cols[j]);
    TestEntry e;
    e.name = "angle_mean(" + fmt(times[j]) + ")";
    e.provenance = "arg X(t,z)/pi is a bounded martingale for kappa = 4";
    e.statistic = m.mean;
    e.expected = base;
    e.tolerance = 3.0 * std::sqrt(m.variance / static_cast<double>(M));
    e.pass = std::fabs(m.mean - base) <= e.tolerance;
    e.samples = static_cast<std::int64_t>(M);
    out.push_back(e);
  }
  return out;
}

ProfileResult harmonic_profile(int scale, const SolverConfig& cfg) {
  const auto d = std::make_shared<const LatticeDomain>(box_spec(scale).build());
  std::vector<std::uint8_t> mask(d->vertex_count(), 0);
  VertexFunction values(d->vertex_count(), 0.0);
  for (std::size_t id = d->interior_count(); id < d->vertex_count(); ++id) {
    mask[id] = 1;
    values[id] = d->h0(static_cast<int>(id));
  }
  const HarmonicField h = harmonic_extension(d, std::move(mask), std::move(values), cfg);
  const double reach = 2.0 * std::sqrt(static_cast<double>(scale));
  const double r_min = 0.5 * std::sqrt(static_cast<double>(scale));
  ProfileResult out;
  out.scale = scale;
  for (std::size_t id = 0; id < d->interior_count(); ++id) {
    const Complex p = embed(d->vertex(static_cast<int>(id)));
    const Complex z = to_half_plane(*d, p);
    if (std::abs(z) > reach || d->inradius(p) < r_min) continue;
    const double model = 1.0 - std::atan2(z.imag(), z.real()) / std::numbers::pi;
    out.max_deviation = std::max(out.max_deviation, std::fabs(h.value(static_cast<int>(id)) - model));
    ++out.vertices;
  }
  return out;
}

std::vector<TestEntry> test_harmonic_profile(int scale, double threshold, const SolverConfig& cfg) {
  const ProfileResult small = harmonic_profile(scale, cfg);
  const ProfileResult large = harmonic_profile(2 * scale, cfg);
  std::vector<TestEntry> out;
  TestEntry a;
  a.name = "profile_deviation(scale " + std::to_string(scale) + ")";
  a.provenance = "|h_j(v) - h~(phi_j(v) - W(t_j))| < eps once the inradius is large";
  a.statistic = small.max_deviation;
  a.expected = 0.0;
  a.tolerance = threshold;
  a.pass = small.max_deviation <= threshold;
  a.samples = static_cast<std::int64_t>(small.vertices);
  out.push_back(a);
  TestEntry b = a;
  b.name = "profile_decay(scale " + std::to_string(2 * scale) + " vs " + std::to_string(scale) + ")";
  b.statistic = large.max_deviation;
  b.expected = small.max_deviation;
  b.tolerance = 0.0;
  b.pass = large.max_deviation < small.max_deviation;
  b.samples = static_cast<std::int64_t>(large.vertices);
  b.note = "passes when the deviation shrinks as the scale doubles";
  out.push_back(b);
  return out;
}

bool hit_hypothesis_violated(const LatticeDomain& d, Complex z, double R) {
  std::vector<std::uint8_t> in(d.vertex_count(), 0);
  for (std::size_t id = 0; id < d.interior_count(); ++id) {
    if (std::abs(embed(d.vertex(static_cast<int>(id))) - z) < R) in[id] = 1;
  }
  std::vector<std::uint8_t> seen(d.vertex_count(), 0);
  for (std::size_t start = 0; start < d.interior_count(); ++start) {
    if (!in[start] || seen[start]) continue;
    bool touches[2] = {false, false};
    std::queue<int> q;
    q.push(static_cast<int>(start));
    seen[start] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int nb : d.neighbors(v)) {
        const auto u = static_cast<std::size_t>(nb);
        if (d.is_boundary(nb)) {
          touches[d.h0(nb)] = true;
        } else if (in[u] && !seen[u]) {
          seen[u] = 1;
          q.push(nb);
        }
      }
    }
    if (touches[0] && touches[1]) return true;
  }
  return false;
}

std::vector<HitEstimate> estimate_hit_probability(const DomainSpec& spec, Complex z, const std::vector<double>& radii,
                                                  double R, std::int64_t M, std::uint64_t seed, int jobs) {
  if (M < 1) throw Error("hit probability: M must be at least 1");
  for (double r : radii) {
    if (!(r > 0.0) || r > R) throw Error("hit probability: radii must lie in (0, R]");
  }
  const auto domain = std::make_shared<const LatticeDomain>(spec.build());
  if (hit_hypothesis_violated(*domain, z, R)) {
    throw Error("hit probability: B(z, R) has a component touching both boundary arcs");
  }
  const GreenCache cache(domain, 0.0);
  const double r_min = *std::min_element(radii.begin(), radii.end());
  std::vector<double> distance(static_cast<std::size_t>(M));
  parallel_for(M, jobs, [&](std::int64_t i) {
    std::size_t checked = 0;
    double best = std::numeric_limits<double>::infinity();
    auto stop = [&](const ExplorerWalk& w) {
      const auto& p = w.path();
      for (; checked + 1 < p.size(); ++checked) best = std::min(best, segment_distance(z, p[checked], p[checked + 1]));
      return best <= r_min;
    };
    const PathSample ps = sample_he(cache, seed, static_cast<std::uint64_t>(i), {}, stop);
    distance[static_cast<std::size_t>(i)] = std::min(best, polyline_distance(z, ps.path));
  });
  std::vector<HitEstimate> out;
  for (double r : radii) {
    HitEstimate h;
    h.r = r;
    h.samples = M;
    double hits = 0.0;
    for (double dist : distance) hits += dist <= r ? 1.0 : 0.0;
    h.frequency = hits / static_cast<double>(M);
    h.standard_error = std::sqrt(h.frequency * (1.0 - h.frequency) / static_cast<double>(M));
    out.push_back(h);
  }
  return out;
}

HitEstimate estimate_hit_probability(const DomainSpec& spec, Complex z, double r, double R, std::int64_t M,
                                     std::uint64_t seed, int jobs) {
  return estimate_hit_probability(spec, z, std::vector<double>{r}, R, M, seed, jobs).front();
}

double hit_exponent(const std::vector<HitEstimate>& est, double R) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, n = 0.0;
  for (const auto& e : est) {
    if (!(e.frequency > 0.0)) continue;
    const double x = std::log(e.r / R);
    const double y = std::log(e.frequency);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1.0;
  }
  if (n < 2.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::size_t index_at_capacity(const Sample& s, double t) {
  const auto it = std::lower_bound(s.curve_t.begin(), s.curve_t.end(), t);
  if (it == s.curve_t.end()) throw Error("comparison: curve shorter than the requested capacity");
  return static_cast<std::size_t>(it - s.curve_t.begin());
}

std::vector<double> functional(const SampleStore& store, double t, int which) {
  std::vector<Complex> segment;
  for (int k = 0; k <= 32; ++k) segment.emplace_back(0.0, 2.0 * std::sqrt(t) * k / 32.0);
  std::vector<double> out;
  for (const auto& s : store.samples) {
    if (s.curve.empty() || s.curve.size() != s.curve_t.size()) throw Error("comparison: store has no curves");
    const std::size_t i = index_at_capacity(s, t);
    const Complex tip = s.curve[i];
    switch (which) {
      case 0: out.push_back(tip.real()); break;
      case 1: out.push_back(dstar(tip, Complex(0.0, 1.0))); break;
      default: out.push_back(hausdorff(std::span(s.curve.data(), i + 1), segment)); break;
    }
  }
  return out;
}

double return_frequency(const SampleStore& store, double t0, double R) {
  double hits = 0.0;
  for (const auto& s : store.samples) {
    const std::size_t i = index_at_capacity(s, t0);
    for (std::size_t k = i + 1; k < s.curve.size(); ++k) {
      if (std::abs(s.curve[k]) < R) {
        hits += 1.0;
        break;
      }
    }
  }
  return hits / static_cast<double>(store.samples.size());
}

}  // namespace

std::vector<TestEntry> compare_he_sle(const SampleStore& a, const SampleStore& b, const CompareOptions& opt) {
  const char* names[] = {"re_tip", "dstar_tip_i", "hausdorff_to_slit"};
  std::vector<TestEntry> out;
  for (double t : opt.t_grid) {
    for (int f = 0; f < 3; ++f) {
      const auto x = functional(a, t, f);
      const auto y = functional(b, t, f);
      const KsResult ks = ks_two_sample(x, y);
      TestEntry e;
      e.name = std::string("ks_") + names[f] + "(" + fmt(t) + ")";
      e.provenance = "the law of the rescaled path tends to the law of the SLE(4) path";
      e.statistic = ks.d;
      e.expected = 0.0;
      e.tolerance = ks_two_sample_critical(x.size(), y.size(), opt.ks_level);
      e.pass = ks.p_value > opt.ks_level;
      e.samples = static_cast<std::int64_t>(x.size() + y.size());
      out.push_back(e);
    }
  }
  for (const auto* store : {&a, &b}) {
    const char* label = store == &a ? "a" : "b";
    std::vector<double> freq;
    for (double t0 : opt.return_t0) freq.push_back(return_frequency(*store, t0, opt.return_radius));
    for (std::size_t k = 0; k < freq.size(); ++k) {
      TestEntry e;
      e.name = std::string("return_frequency_") + label + "(T0 " + fmt(opt.return_t0[k]) + ")";
      e.provenance = "P[path after capacity T returns to B(0,R)] -> 0 as T grows";
      e.statistic = freq[k];
      e.expected = k > 0 ? freq[k - 1] : freq[k];
      e.tolerance = 0.0;
      e.pass = k == 0 || freq[k] < freq[k - 1];
      e.samples = static_cast<std::int64_t>(store->samples.size());
      e.gated = k > 0;
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace he
