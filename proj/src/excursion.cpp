#include "he/excursion.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace he {

namespace {

std::vector<Vertex> fixed_interior(const HarmonicField& f) {
  std::vector<Vertex> out;
  const auto& d = f.domain();
  for (std::size_t id = 0; id < d.interior_count(); ++id) {
    if (f.is_fixed(static_cast<int>(id))) out.push_back(d.vertex(static_cast<int>(id)));
  }
  return out;
}

struct Prepared {
  std::vector<std::uint8_t> absorbing;
  std::set<DirectedEdge> e1;
  std::set<DirectedEdge> e2;
  bool e2_full = false;
};

Prepared prepare(const ExcursionSpec& s) {
  if (!s.domain) throw Error("excursion: spec without a domain");
  const auto& d = *s.domain;
  Prepared p;
  p.absorbing = absorbing_mask(d, s.killed);
  const EdgeSets valid = edge_sets(d, s.killed);
  const std::set<DirectedEdge> out(valid.e_out.begin(), valid.e_out.end());
  const std::set<DirectedEdge> in(valid.e_in.begin(), valid.e_in.end());
  for (const auto& e : s.e1) {
    if (!out.count(e)) throw Error("excursion: E1 edge is not an outgoing edge of the domain");
    p.e1.insert(e);
  }
  for (const auto& e : s.e2) {
    if (!in.count(e)) throw Error("excursion: E2 edge is not an incoming edge of the domain");
    p.e2.insert(e);
  }
  p.e2_full = p.e2.size() == in.size();
  return p;
}

}  // namespace

EdgeSets edge_sets(const LatticeDomain& d, std::span<const Vertex> killed) {
  const auto absorbing = absorbing_mask(d, killed);
  EdgeSets out;
  for (std::size_t id = 0; id < d.vertex_count(); ++id) {
    if (!absorbing[id]) continue;
    const Vertex& b = d.vertex(static_cast<int>(id));
    for (int nb : d.neighbors(static_cast<int>(id))) {
      if (nb < 0) continue;
      const Vertex& u = d.vertex(nb);
      if (!d.edge_in_open_domain(b, u)) continue;
      out.e_out.push_back({b, u});
      out.e_in.push_back({u, b});
    }
  }
  return out;
}

ExcursionSpec full_spec(DomainPtr d, std::vector<Vertex> killed) {
  const EdgeSets e = edge_sets(*d, killed);
  return ExcursionSpec{std::move(d), std::move(killed), e.e_out, e.e_in};
}

double total_mass(const ExcursionSpec& s) {
  const auto& d = *s.domain;
  const Prepared p = prepare(s);
  if (p.e1.empty()) return 0.0;
  DirichletFactorization f(d, p.absorbing);
  std::vector<double> exits(f.free_count(), 0.0);
  for (const auto& e : p.e2) {
    const int li = f.local_index(d.id_of(e.tail));
    if (li >= 0) exits[static_cast<std::size_t>(li)] += 1.0;
  }
  const auto q = f.solve(exits);
  double mass = 0.0;
  for (const auto& e : p.e1) {
    const int li = f.local_index(d.id_of(e.head));
    mass += li >= 0 ? q[static_cast<std::size_t>(li)] : (p.e2.count(e) ? 1.0 : 0.0);
  }
  return mass / 6.0;
}

double visit_integral(const ExcursionSpec& s, const Vertex& v) {
  const auto& d = *s.domain;
  const Prepared p = prepare(s);
  if (!p.e2_full) throw Error("visit_integral: E2 must be the full incoming edge set");
  DirichletFactorization f(d, p.absorbing);
  const int id = d.id_of(v);
  const int lv = id >= 0 ? f.local_index(id) : -1;
  if (lv < 0) throw Error("visit_integral: vertex is not free");
  if (p.e1.empty()) return 0.0;
  std::vector<double> unit(f.free_count(), 0.0);
  unit[static_cast<std::size_t>(lv)] = 1.0;
  const auto col = f.solve(unit);
  double sum = 0.0;
  for (const auto& e : p.e1) {
    const int li = f.local_index(d.id_of(e.head));
    if (li >= 0) sum += col[static_cast<std::size_t>(li)];
  }
  return sum;
}

ExcursionSummary summarize(const ExcursionSpec& s) {
  const auto& d = *s.domain;
  const Prepared p = prepare(s);
  if (!p.e2_full) throw Error("summarize: E2 must be the full incoming edge set");
  ExcursionSummary out;
  out.total_mass = total_mass(s);
  out.visit_integrals.assign(d.vertex_count(), 0.0);
  DirichletFactorization f(d, p.absorbing);
  std::vector<double> starts(f.free_count(), 0.0);
  for (const auto& e : p.e1) {
    const int li = f.local_index(d.id_of(e.head));
    if (li >= 0) starts[static_cast<std::size_t>(li)] += 1.0;
  }
  const auto v = f.solve(starts);
  for (std::size_t i = 0; i < v.size(); ++i) out.visit_integrals[static_cast<std::size_t>(f.id_of_local(i))] = v[i];
  return out;
}

double ball_hit_mass(const ExcursionSpec& s, const Vertex& v) {
  const auto& d = *s.domain;
  const Prepared p = prepare(s);
  if (!p.e2_full) throw Error("ball_hit_mass: E2 must be the full incoming edge set");
  const Complex c = embed(v);
  const double inr = d.inradius(c);
  if (inr < 2.0) throw Error("ball_hit_mass: inradius below 2, ball degenerate");
  const double r = 0.5 * inr;
  std::vector<std::uint8_t> in_ball(d.vertex_count(), 0);
  auto absorbing = p.absorbing;
  VertexFunction values(d.vertex_count(), 0.0);
  for (std::size_t id = 0; id < d.vertex_count(); ++id) {
    if (std::abs(embed(d.vertex(static_cast<int>(id))) - c) <= r) {
      in_ball[id] = 1;
      absorbing[id] = 1;
      values[id] = 1.0;
    }
  }
  const auto hit = DirichletFactorization(d, absorbing).extend(values);
  double mass = 0.0;
  for (const auto& e : p.e1) {
    const auto b = static_cast<std::size_t>(d.id_of(e.tail));
    const auto u = static_cast<std::size_t>(d.id_of(e.head));
    if (in_ball[b] || in_ball[u]) {
      mass += 1.0;
    } else if (!p.absorbing[u]) {
      mass += hit[u];
    }
  }
  return mass / 6.0;
}

std::vector<DirectedEdge> coloured_exit_edges(const ExplorerState& s) {
  const auto& f = s.field();
  const auto& d = f.domain();
  const auto killed = fixed_interior(f);
  std::vector<DirectedEdge> out;
  for (const auto& e : edge_sets(d, killed).e_in) {
    if (f.value(d.id_of(e.head)) == 1.0) out.push_back(e);
  }
  return out;
}

std::vector<DirectedEdge> minus_arc_edges(const LatticeDomain& d) {
  std::vector<DirectedEdge> out;
  for (const auto& e : edge_sets(d, {}).e_out) {
    if (d.h0(d.id_of(e.tail)) == 0) out.push_back(e);
  }
  return out;
}

MartingaleCheck nu_martingale_check(const ExplorerState& s, std::span<const DirectedEdge> e_minus,
                                    const SolverConfig& cfg) {
  auto mass = [&](const ExplorerState& st) {
    ExcursionSpec spec;
    spec.domain = st.field().domain_ptr();
    spec.killed = fixed_interior(st.field());
    spec.e1.assign(e_minus.begin(), e_minus.end());
    spec.e2 = coloured_exit_edges(st);
    return total_mass(spec);
  };
  const Branch b = branch(s, cfg);
  MartingaleCheck out;
  out.lhs = mass(s);
  out.rhs = b.p * mass(b.black) + (1.0 - b.p) * mass(b.white);
  return out;
}

double dirichlet_energy(const LatticeDomain& d, const VertexFunction& f) {
  if (f.size() != d.vertex_count()) throw Error("dirichlet_energy: function must cover every vertex");
  double e = 0.0;
  for (std::size_t id = 0; id < d.vertex_count(); ++id) {
    for (int nb : d.neighbors(static_cast<int>(id))) {
      if (nb <= static_cast<int>(id)) continue;
      if (!d.is_interior(static_cast<int>(id)) && !d.is_interior(nb) &&
          !d.edge_in_closure(d.vertex(static_cast<int>(id)), d.vertex(nb))) {
        continue;
      }
      const double diff = f[id] - f[static_cast<std::size_t>(nb)];
      e += diff * diff;
    }
  }
  return e;
}

VertexFunction closure_laplacian(const LatticeDomain& d, const VertexFunction& f) {
  if (f.size() != d.vertex_count()) throw Error("closure_laplacian: function must cover every vertex");
  VertexFunction out(d.vertex_count(), 0.0);
  for (std::size_t id = 0; id < d.vertex_count(); ++id) {
    for (int nb : d.neighbors(static_cast<int>(id))) {
      if (nb < 0) continue;
      if (!d.is_interior(static_cast<int>(id)) && !d.is_interior(nb) &&
          !d.edge_in_closure(d.vertex(static_cast<int>(id)), d.vertex(nb))) {
        continue;
      }
      out[id] += f[static_cast<std::size_t>(nb)] - f[id];
    }
  }
  return out;
}

void write_summary_csv(std::ostream& os, const LatticeDomain& d, const ExcursionSummary& s) {
  os << "quantity,value\n";
  os.precision(17);
  os << "total_mass," << s.total_mass << '\n';
  for (std::size_t id = 0; id < s.visit_integrals.size(); ++id) {
    if (s.visit_integrals[id] == 0.0) continue;
    const auto& v = d.vertex(static_cast<int>(id));
    os << "visit_integral(" << v.a << ' ' << v.b << ")," << s.visit_integrals[id] << '\n';
  }
}

}  // namespace he
