#include "he/explorer.hpp"

#include <algorithm>
#include <ostream>

#include "he/rng.hpp"

namespace he {

ExplorerWalk::ExplorerWalk(const LatticeDomain& d) : domain_(&d) {
  const auto& s = d.v_start();
  const int a = d.id_of(s.first());
  const int b = d.id_of(s.second());
  if (a < 0 || b < 0 || d.h0(a) == d.h0(b)) throw Error("explorer: start edge must join the two arcs");
  zero_ = d.h0(a) == 0 ? s.first() : s.second();
  one_ = d.h0(a) == 0 ? s.second() : s.first();
  path_.push_back(s.position());
}

Vertex ExplorerWalk::next_vertex() const {
  const int k = direction_index(zero_, one_);
  return zero_ + kDirections[static_cast<std::size_t>((k + 1) % 6)];
}

Triangle ExplorerWalk::next_triangle() const { return Triangle::from_vertices(zero_, one_, next_vertex()); }

void ExplorerWalk::advance(bool black) {
  if (terminated_) throw Error("explorer: step after termination");
  const Vertex v = next_vertex();
  if (!domain_->contains(v)) throw Error("explorer: path left the domain");
  path_.push_back(next_triangle().centroid());
  previous_ = current_mid();
  if (black) {
    one_ = v;
  } else {
    zero_ = v;
  }
  ++steps_;
  const EdgeMidpoint m = current_mid();
  path_.push_back(m.position());
  if (m == domain_->v_end()) {
    terminated_ = true;
  } else if (steps_ >= domain_->triangle_count()) {
    throw Error("explorer: no termination within the triangle count");
  }
}

double ExplorerState::next_probability() const {
  const int id = field_.domain().id_of(walk_.next_vertex());
  return std::clamp(field_.value(id), 0.0, 1.0);
}

void ExplorerState::advance(double x, const SolverConfig& cfg, bool solve) {
  if (walk_.terminated()) throw Error("explorer: step after termination");
  if (!(x >= 0.0 && x <= 1.0)) throw Error("explorer: coin must lie in [0, 1]");
  const Vertex v = walk_.next_vertex();
  const int id = field_.domain().id_of(v);
  if (id < 0) throw Error("explorer: path left the domain");
  StepRecord rec;
  rec.v_next = v;
  rec.x = x;
  rec.already_fixed = field_.is_fixed(id);
  rec.p = rec.already_fixed ? field_.value(id) : (solve ? std::clamp(field_.value(id), 0.0, 1.0) : 0.5);
  const bool black = rec.already_fixed ? rec.p == 1.0 : x <= rec.p;
  rec.chose_double_prime = black;
  if (!rec.already_fixed) {
    if (solve) {
      field_ = refix(field_, v, black ? 1.0 : 0.0, cfg);
    } else {
      auto mask = field_.fixed_mask();
      auto values = field_.values();
      mask[static_cast<std::size_t>(id)] = 1;
      values[static_cast<std::size_t>(id)] = black ? 1.0 : 0.0;
      field_ = HarmonicField(field_.domain_ptr(), std::move(mask), std::move(values));
    }
  }
  walk_.advance(black);
  log_.push_back(rec);
}

ExplorerState init(DomainPtr d, const SolverConfig& cfg) {
  std::vector<std::uint8_t> mask(d->vertex_count(), 0);
  VertexFunction values(d->vertex_count(), 0.0);
  for (std::size_t id = d->interior_count(); id < d->vertex_count(); ++id) {
    mask[id] = 1;
    values[id] = d->h0(static_cast<int>(id));
  }
  ExplorerWalk walk(*d);
  return ExplorerState(std::move(walk), harmonic_extension(std::move(d), std::move(mask), std::move(values), cfg));
}

ExplorerState step(const ExplorerState& s, double x, const SolverConfig& cfg) {
  ExplorerState next = s;
  next.advance(x, cfg, true);
  return next;
}

double explorer_coin(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t n) {
  return 1.0 - RandomStream(seed, Purpose::ExplorerCoins, sample_index).uniform(n);
}

double percolation_coin(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t n) {
  return 1.0 - RandomStream(seed, Purpose::Percolation, sample_index).uniform(n);
}

ExplorerState run(DomainPtr d, std::uint64_t seed, const SolverConfig& cfg, std::uint64_t sample_index) {
  ExplorerState s = init(std::move(d), cfg);
  while (!s.terminated()) s.advance(explorer_coin(seed, sample_index, s.n()), cfg, true);
  return s;
}

Branch branch(const ExplorerState& s, const SolverConfig& cfg) {
  if (s.terminated()) throw Error("explorer: branch after termination");
  const double p = s.next_probability();
  const int id = s.field().domain().id_of(s.walk().next_vertex());
  if (s.field().is_fixed(id)) {
    ExplorerState child = step(s, p == 1.0 ? 0.0 : 1.0, cfg);
    return Branch{p, child, child};
  }
  ExplorerState black = s;
  black.advance(0.0, cfg, true);
  ExplorerState white = s;
  // The white child must exist even when p rounds to 1.
  if (p < 1.0) {
    white.advance(1.0, cfg, true);
  } else {
    white.field_ = refix(white.field_, white.walk_.next_vertex(), 0.0, cfg);
    white.log_.push_back({white.walk_.next_vertex(), p, 1.0, false, false});
    white.walk_.advance(false);
  }
  return Branch{p, std::move(black), std::move(white)};
}

ExplorerState run_percolation(DomainPtr d, std::uint64_t seed, std::uint64_t sample_index) {
  std::vector<std::uint8_t> mask(d->vertex_count(), 0);
  VertexFunction values(d->vertex_count(), 0.5);
  for (std::size_t id = d->interior_count(); id < d->vertex_count(); ++id) {
    mask[id] = 1;
    values[id] = d->h0(static_cast<int>(id));
  }
  ExplorerWalk walk(*d);
  ExplorerState s(std::move(walk), HarmonicField(d, std::move(mask), std::move(values)));
  const SolverConfig unused;
  while (!s.terminated()) s.advance(percolation_coin(seed, sample_index, s.n()), unused, false);
  return s;
}

namespace {

template <class Colour>
PathSample sample_process(const LatticeDomain& d, const std::vector<Vertex>& probes, const StopRule& stop,
                          Colour&& colour) {
  std::vector<std::int8_t> revealed(d.vertex_count(), -1);
  for (std::size_t id = d.interior_count(); id < d.vertex_count(); ++id) {
    revealed[id] = static_cast<std::int8_t>(d.h0(static_cast<int>(id)));
  }
  ExplorerWalk walk(d);
  PathSample out;
  while (!walk.terminated()) {
    const Vertex v = walk.next_vertex();
    const int id = d.id_of(v);
    if (id < 0) throw Error("explorer: path left the domain");
    StepRecord rec;
    rec.v_next = v;
    const auto n = walk.steps();
    if (revealed[static_cast<std::size_t>(id)] >= 0) {
      rec.already_fixed = true;
      rec.p = revealed[static_cast<std::size_t>(id)];
      rec.x = colour.coin(n);
      rec.chose_double_prime = rec.p == 1.0;
    } else {
      rec.x = colour.coin(n);
      rec.p = colour.probability(id);
      rec.chose_double_prime = rec.x <= rec.p;
      colour.reveal(id, rec.chose_double_prime);
      revealed[static_cast<std::size_t>(id)] = rec.chose_double_prime ? 1 : 0;
    }
    walk.advance(rec.chose_double_prime);
    out.log.push_back(rec);
    if (stop && stop(walk)) break;
  }
  out.terminated = walk.terminated();
  out.path = walk.path();
  for (const auto& v : probes) {
    const int id = d.id_of(v);
    if (id < 0) throw Error("explorer: probe outside the domain");
    const auto r = revealed[static_cast<std::size_t>(id)];
    out.probe_values.push_back(r >= 0 ? static_cast<double>(r) : colour.unrevealed(id));
  }
  return out;
}

}  // namespace

PathSample sample_he(const GreenCache& cache, std::uint64_t seed, std::uint64_t sample_index,
                     const std::vector<Vertex>& probes, const StopRule& stop) {
  struct HeColour {
    CapacitanceSolver solver;
    std::uint64_t seed, index;
    double coin(std::size_t n) const { return explorer_coin(seed, index, n); }
    double probability(int id) { return std::clamp(solver.value(id), 0.0, 1.0); }
    void reveal(int id, bool black) { solver.fix(id, black ? 1.0 : 0.0); }
    double unrevealed(int id) { return solver.value(id); }
  } colour{CapacitanceSolver(cache), seed, sample_index};
  return sample_process(cache.domain(), probes, stop, colour);
}

PathSample sample_percolation(const LatticeDomain& d, std::uint64_t seed, std::uint64_t sample_index,
                              const std::vector<Vertex>& probes, const StopRule& stop) {
  struct PercolationColour {
    std::uint64_t seed, index;
    double coin(std::size_t n) const { return percolation_coin(seed, index, n); }
    double probability(int) const { return 0.5; }
    void reveal(int, bool) const {}
    double unrevealed(int) const { return -1.0; }
  } colour{seed, sample_index};
  return sample_process(d, probes, stop, colour);
}

void write_path_csv(std::ostream& os, const std::vector<Complex>& path) {
  os << "step,x,y\n";
  os.precision(17);
  for (std::size_t i = 0; i < path.size(); ++i) {
    os << (i + 1) / 2 << ',' << path[i].real() << ',' << path[i].imag() << '\n';
  }
}

void write_step_log_csv(std::ostream& os, const std::vector<StepRecord>& log) {
  os << "n,va,vb,p,x,fixed,turn\n";
  os.precision(17);
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& r = log[i];
    os << i + 1 << ',' << r.v_next.a << ',' << r.v_next.b << ',' << r.p << ',' << r.x << ','
       << (r.already_fixed ? 1 : 0) << ',' << (r.chose_double_prime ? 'R' : 'L') << '\n';
  }
}

}  // namespace he
