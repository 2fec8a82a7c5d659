#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "doctest.h"
#include "he/excursion.hpp"
#include "he/oracle.hpp"

using namespace he;

namespace {

DomainPtr share(LatticeDomain d) { return std::make_shared<const LatticeDomain>(std::move(d)); }

std::vector<DirectedEdge> random_subset(const std::vector<DirectedEdge>& all, std::mt19937_64& rng) {
  std::vector<DirectedEdge> out;
  std::bernoulli_distribution coin(0.4);
  for (const auto& e : all) {
    if (coin(rng)) out.push_back(e);
  }
  if (out.empty()) out.push_back(all.front());
  return out;
}

std::vector<DirectedEdge> reversed(const std::vector<DirectedEdge>& es) {
  std::vector<DirectedEdge> out;
  for (const auto& e : es) out.push_back(rev(e));
  return out;
}

std::vector<Vertex> free_vertices(const LatticeDomain& d, const std::vector<Vertex>& killed) {
  const auto mask = absorbing_mask(d, killed);
  std::vector<Vertex> out;
  for (std::size_t id = 0; id < d.vertex_count(); ++id) {
    if (!mask[id]) out.push_back(d.vertex(static_cast<int>(id)));
  }
  return out;
}

int hex_norm(const Vertex& v) { return (std::abs(v.a) + std::abs(v.b) + std::abs(v.a + v.b)) / 2; }

}  // namespace

TEST_SUITE("excursion") {
  TEST_CASE("edge sets") {
    const auto d = build_hexagon_domain(3);
    const auto es = edge_sets(d, {});
    REQUIRE(es.e_in.size() == es.e_out.size());
    for (std::size_t k = 0; k < es.e_out.size(); ++k) CHECK(es.e_in[k] == rev(es.e_out[k]));
    for (const auto& e : es.e_out) CHECK(d.is_boundary(d.id_of(e.tail)));
    // every interior vertex killed: only boundary-to-boundary chords remain
    std::vector<Vertex> all(d.vertices().begin(), d.vertices().begin() + static_cast<long>(d.interior_count()));
    for (const auto& e : edge_sets(d, all).e_out) {
      CHECK(d.edge_in_open_domain(e.tail, e.head));
    }
    const auto box = build_box_domain(6, 2);
    std::vector<Vertex> box_all(box.vertices().begin(), box.vertices().begin() + static_cast<long>(box.interior_count()));
    std::size_t chords = 0;
    for (const auto& e : edge_sets(box, box_all).e_out) {
      if (box.is_boundary(box.id_of(e.head))) ++chords;
    }
    CHECK(chords > 0);
  }

  TEST_CASE("total mass of the full measure is |E1|/6") {
    const auto d = share(build_box_domain(12, 6));
    const std::vector<Vertex> killed{d->vertex(4), d->vertex(9)};
    const auto s = full_spec(d, killed);
    CHECK(total_mass(s) == doctest::Approx(static_cast<double>(s.e1.size()) / 6.0).epsilon(1e-12));
    auto empty = s;
    empty.e1.clear();
    CHECK(total_mass(empty) == 0.0);
  }

  TEST_CASE("reversal symmetry and visit integrals on random specs") {
    std::mt19937_64 rng(5);
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto d = share(build_random_domain(9, 100 + k));
      std::vector<Vertex> killed;
      if (d->interior_count() > 3) killed.push_back(d->vertex(static_cast<int>(k % d->interior_count())));
      const auto full = full_spec(d, killed);
      ExcursionSpec s = full;
      s.e1 = random_subset(full.e1, rng);
      s.e2 = random_subset(full.e2, rng);
      ExcursionSpec r = full;
      r.e1 = reversed(s.e2);
      r.e2 = reversed(s.e1);
      CHECK(std::abs(total_mass(s) - total_mass(r)) < 1e-9);

      ExcursionSpec lemma = full;
      lemma.e1 = s.e1;
      const auto fv = free_vertices(*d, killed);
      if (fv.empty()) continue;
      const Vertex v = fv[k % fv.size()];
      CHECK(std::abs(visit_integral(full, v) - 1.0) < 1e-9);
      CHECK(std::abs(visit_integral(lemma, v) - harmonic_measure_edges(*d, killed, v, reversed(lemma.e1))) < 1e-9);
      const auto sum = summarize(lemma);
      CHECK(sum.visit_integrals[static_cast<std::size_t>(d->id_of(v))] == doctest::Approx(visit_integral(lemma, v)));
      for (double x : sum.visit_integrals) CHECK(x >= 0.0);
    }
  }

  TEST_CASE("fundamental-matrix oracle") {
    for (std::uint64_t k = 0; k < 6; ++k) {
      const auto d = share(k == 0 ? build_hexagon_domain(2) : build_random_domain(5, 200 + k));
      if (d->interior_count() > 12 || d->interior_count() == 0) continue;
      const WalkOracle oracle(*d, {});
      std::mt19937_64 rng(k);
      const auto full = full_spec(d);
      ExcursionSpec s = full;
      s.e1 = random_subset(full.e1, rng);
      s.e2 = random_subset(full.e2, rng);
      CHECK(std::abs(total_mass(s) - oracle.total_mass(s.e1, s.e2)) < 1e-10);
      ExcursionSpec lemma = full;
      lemma.e1 = s.e1;
      for (int id = 0; id < static_cast<int>(d->interior_count()); ++id) {
        CHECK(std::abs(visit_integral(lemma, d->vertex(id)) - oracle.visit_integral(lemma.e1, d->vertex(id))) < 1e-10);
        CHECK(std::abs(oracle.visits(d->vertex(id), d->vertex(id)) -
                       green(*d, {}, d->vertex(id))[static_cast<std::size_t>(id)]) < 1e-10);
      }
    }
  }

  TEST_CASE("ball hit mass") {
    const auto d = share(build_hexagon_domain(3));
    const Vertex c{0, 0};
    const auto full = full_spec(d);
    const double whole = ball_hit_mass(full, c);
    CHECK(whole > 0.0);
    CHECK(whole <= total_mass(full) + 1e-12);

    // oracle: the ball's vertices absorb, leaving 12 free vertices
    std::vector<Vertex> ball;
    const double r = 0.5 * d->inradius(embed(c));
    for (const auto& v : d->vertices()) {
      if (std::abs(embed(v) - embed(c)) <= r) ball.push_back(v);
    }
    const WalkOracle oracle(*d, ball);
    std::vector<DirectedEdge> into_ball;
    for (const auto& v : free_vertices(*d, ball)) {
      for (const auto& w : ball) {
        if (adjacent(v, w)) into_ball.push_back({v, w});
      }
    }
    std::mt19937_64 rng(3);
    ExcursionSpec part = full;
    part.e1 = random_subset(full.e1, rng);
    double expect = 0.0;
    for (const auto& e : part.e1) {
      const bool in = std::find(ball.begin(), ball.end(), e.head) != ball.end();
      expect += in ? 1.0 : (d->is_interior(d->id_of(e.head)) ? oracle.harmonic_measure(e.head, into_ball) : 0.0);
    }
    CHECK(std::abs(ball_hit_mass(part, c) - expect / 6.0) < 1e-10);
    CHECK(ball_hit_mass(part, c) <= whole + 1e-12);
    CHECK(ball_hit_mass(part, c) <= total_mass(part) + 1e-12);
  }

  TEST_CASE("a killed ring shields the ball") {
    const auto d = share(build_hexagon_domain(7));
    std::vector<Vertex> ring;
    for (const auto& v : d->vertices()) {
      if (hex_norm(v) == 5) ring.push_back(v);
    }
    auto s = full_spec(d, ring);
    std::vector<DirectedEdge> outer;
    for (const auto& e : s.e1) {
      if (d->is_boundary(d->id_of(e.tail)) && hex_norm(e.head) > 5) outer.push_back(e);
    }
    REQUIRE_FALSE(outer.empty());
    s.e1 = outer;
    CHECK(ball_hit_mass(s, {0, 0}) == 0.0);
    CHECK_THROWS_AS(ball_hit_mass(full_spec(d), d->boundary_cycle()[0] + Vertex{0, 1}), Error);
  }

  TEST_CASE("norm of nu is a one-step martingale") {
    for (int w : {10, 12}) {
      const auto d = share(build_box_domain(w, 6));
      const auto e_minus = minus_arc_edges(*d);
      auto s = init(d);
      std::mt19937_64 rng(static_cast<std::uint64_t>(w));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int k = 0; k < 10 && !s.terminated(); ++k) {
        const auto m = nu_martingale_check(s, e_minus);
        CHECK(std::abs(m.lhs - m.rhs) < 1e-8);
        const auto none = nu_martingale_check(s, {});
        CHECK(none.lhs == 0.0);
        CHECK(none.rhs == 0.0);
        s = step(s, 1.0 - u(rng));
      }
    }
  }

  TEST_CASE("Dirichlet energy") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const auto d = share(build_random_domain(10, 300 + k));
      CHECK(dirichlet_energy(*d, VertexFunction(d->vertex_count(), 2.5)) == 0.0);
      VertexFunction f(d->vertex_count());
      for (auto& x : f) x = u(rng);
      const auto lap = closure_laplacian(*d, f);
      double rhs = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) rhs -= f[i] * lap[i];
      CHECK(std::abs(dirichlet_energy(*d, f) - rhs) < 1e-10 * 10);

      std::vector<std::uint8_t> mask(d->vertex_count(), 0);
      VertexFunction vals(d->vertex_count(), 0.0);
      for (std::size_t id = d->interior_count(); id < d->vertex_count(); ++id) {
        mask[id] = 1;
        vals[id] = d->h0(static_cast<int>(id));
      }
      const auto g = harmonic_extension(d, mask, vals).values();
      const double eg = dirichlet_energy(*d, g);
      for (int trial = 0; trial < 20; ++trial) {
        auto h = g;
        for (std::size_t id = 0; id < d->interior_count(); ++id) h[id] += 0.1 * u(rng);
        CHECK(eg <= dirichlet_energy(*d, h));
      }
    }
    CHECK_THROWS_AS(dirichlet_energy(build_hexagon_domain(2), VertexFunction(3, 0.0)), Error);
  }

  TEST_CASE("summary csv") {
    const auto d = share(build_hexagon_domain(2));
    std::ostringstream os;
    write_summary_csv(os, *d, summarize(full_spec(d)));
    CHECK(os.str().rfind("quantity,value\n", 0) == 0);
  }
}
