#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "he/excursion.hpp"
#include "he/lattice.hpp"

using namespace he;

namespace {

// Ray casting against the boundary polygon, independent of the library's
// point_inside.
bool inside_polygon(const std::vector<Vertex>& cycle, Complex z) {
  bool in = false;
  for (std::size_t i = 0, j = cycle.size() - 1; i < cycle.size(); j = i++) {
    const Complex a = embed(cycle[i]);
    const Complex b = embed(cycle[j]);
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      const double x = a.real() + (z.imag() - a.imag()) / (b.imag() - a.imag()) * (b.real() - a.real());
      if (z.real() < x) in = !in;
    }
  }
  return in;
}

struct Census {
  std::size_t interior = 0;
  std::size_t triangles = 0;
};

Census brute_census(const LatticeDomain& d) {
  const auto cycle = d.boundary_cycle();
  int amin = 1 << 20, amax = -(1 << 20), bmin = 1 << 20, bmax = -(1 << 20);
  for (const auto& v : cycle) {
    amin = std::min(amin, v.a);
    amax = std::max(amax, v.a);
    bmin = std::min(bmin, v.b);
    bmax = std::max(bmax, v.b);
  }
  const std::set<Vertex> on_boundary(cycle.begin(), cycle.end());
  Census c;
  for (int a = amin - 1; a <= amax + 1; ++a) {
    for (int b = bmin - 1; b <= bmax + 1; ++b) {
      const Vertex v{a, b};
      if (!on_boundary.count(v) && inside_polygon(cycle, embed(v))) ++c.interior;
      for (bool up : {true, false}) {
        if (inside_polygon(cycle, Triangle{v, up}.centroid())) ++c.triangles;
      }
    }
  }
  return c;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("directions and embedding") {
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(direction_index({0, 0}, kDirections[k]) == static_cast<int>(k));
      CHECK(std::abs(std::abs(embed(kDirections[k])) - 1.0) < 1e-15);
    }
    CHECK(direction_index({0, 0}, {2, 0}) == -1);
    CHECK(std::abs(embed({0, 1}) - Complex(0.5, std::sqrt(3.0) / 2.0)) < 1e-15);
  }

  TEST_CASE("triangles") {
    const Triangle t{{0, 0}, true};
    const auto vs = t.vertices();
    CHECK(Triangle::from_vertices(vs[2], vs[0], vs[1]) == t);
    const EdgeMidpoint m({0, 0}, {1, 0});
    CHECK(t.contains_edge(m));
    CHECK(t.opposite(m) == Vertex{0, 1});
    const auto both = triangles_on_edge(m);
    CHECK(both[0] == t);
    CHECK(triangle_across(m, both[0]) == both[1]);
    CHECK(triangle_across(m, both[1]) == both[0]);
    CHECK_THROWS_AS(Triangle::from_vertices({0, 0}, {1, 0}, {2, 0}), Error);
  }

  TEST_CASE("hexagon counts") {
    for (int r : {2, 3, 5}) {
      CAPTURE(r);
      const auto d = build_hexagon_domain(r);
      CHECK(d.vertex_count() == static_cast<std::size_t>(3 * r * (r + 1) + 1));
      CHECK(d.interior_count() == static_cast<std::size_t>(3 * r * (r - 1) + 1));
      CHECK(d.boundary_count() == static_cast<std::size_t>(6 * r));
      CHECK(d.triangle_count() == static_cast<std::size_t>(6 * r * r));
    }
  }

  TEST_CASE("brute-force census of boxes and random domains") {
    std::vector<LatticeDomain> ds;
    ds.push_back(build_box_domain(12, 6));
    ds.push_back(build_box_domain(9, 5, 2));
    for (std::uint64_t s = 1; s <= 5; ++s) ds.push_back(build_random_domain(8, s));
    for (const auto& d : ds) {
      const Census c = brute_census(d);
      CHECK(c.interior == d.interior_count());
      CHECK(c.triangles == d.triangle_count());
    }
  }

  TEST_CASE("ids, neighbours and arcs") {
    const auto d = build_box_domain(12, 6);
    for (std::size_t id = 0; id < d.vertex_count(); ++id) {
      const int i = static_cast<int>(id);
      CHECK(d.id_of(d.vertex(i)) == i);
      if (d.is_interior(i)) {
        for (std::size_t k = 0; k < 6; ++k) {
          const int nb = d.neighbors(i)[k];
          REQUIRE(nb >= 0);
          CHECK(d.vertex(nb) == d.vertex(i) + kDirections[k]);
        }
      }
    }
    CHECK(d.arc_plus().size() + d.arc_minus().size() == d.boundary_count());
    for (const auto& v : d.arc_plus()) CHECK(d.h0(d.id_of(v)) == 1);
    for (const auto& v : d.arc_minus()) CHECK(d.h0(d.id_of(v)) == 0);
    CHECK(d.edge_on_boundary(d.v_start().first(), d.v_start().second()));
    CHECK(d.h0(d.id_of(d.v_start().first())) != d.h0(d.id_of(d.v_start().second())));
  }

  TEST_CASE("box is mirror symmetric about the marked edges") {
    const auto d = build_box_domain(12, 6);
    const double axis = d.v_start().position().real();
    CHECK(std::abs(d.v_end().position().real() - axis) < 1e-12);
    for (const auto& v : d.vertices()) {
      const Complex z = embed(v);
      const Complex m(2.0 * axis - z.real(), z.imag());
      const double b = m.imag() / (std::sqrt(3.0) / 2.0);
      const Vertex w{static_cast<int>(std::lround(m.real() - b / 2.0)), static_cast<int>(std::lround(b))};
      REQUIRE(std::abs(embed(w) - m) < 1e-9);
      const int id = d.id_of(w);
      REQUIRE(id >= 0);
      if (d.is_boundary(id)) CHECK(d.h0(id) != d.h0(d.id_of(v)));
    }
  }

  TEST_CASE("inradius and point_inside") {
    const auto d = build_hexagon_domain(4);
    CHECK(d.point_inside({0.0, 0.0}));
    CHECK_FALSE(d.point_inside({10.0, 0.0}));
    CHECK(d.inradius({0.0, 0.0}) == doctest::Approx(4.0 * std::sqrt(3.0) / 2.0));
  }

  TEST_CASE("edge classification matches a midpoint scan") {
    const auto d = build_hexagon_domain(3);
    const auto cycle = d.boundary_cycle();
    std::set<std::pair<Vertex, Vertex>> sides;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const Vertex& p = cycle[i];
      const Vertex& q = cycle[(i + 1) % cycle.size()];
      sides.insert({p, q});
      sides.insert({q, p});
    }
    std::size_t brute = 0;
    for (const auto& b : cycle) {
      for (const auto& dir : kDirections) {
        const Vertex u = b + dir;
        if (!d.contains(u) || sides.count({b, u})) continue;
        if (inside_polygon(cycle, 0.5 * (embed(b) + embed(u)))) ++brute;
      }
    }
    CHECK(edge_sets(d, {}).e_out.size() == brute);
  }

  TEST_CASE("HEDOM round trip") {
    for (const auto& d : {build_box_domain(10, 4), build_hexagon_domain(3), build_random_domain(7, 11)}) {
      std::stringstream ss;
      write_domain(ss, d);
      const auto e = read_domain(ss);
      CHECK(e.vertices() == d.vertices());
      CHECK(e.v_start() == d.v_start());
      CHECK(e.v_end() == d.v_end());
      CHECK(e.arc_plus() == d.arc_plus());
    }
  }

  TEST_CASE("invalid domains are rejected") {
    CHECK_THROWS_AS(build_box_domain(3, 1), Error);
    CHECK_THROWS_AS(build_hexagon_domain(1), Error);
    std::stringstream bad("HEDOM 1\n0 0 0\n1 0 1\n0 1 1\nVSTART 0 0 1 0\nVEND 0 0 1 0\n");
    CHECK_THROWS_AS(read_domain(bad), Error);
    std::stringstream colours;
    write_domain(colours, build_hexagon_domain(2));
    std::string text = colours.str();
    text.replace(text.find(" 0\n"), 3, " 1\n");
    std::stringstream flipped(text);
    CHECK_THROWS_AS(read_domain(flipped), Error);
    std::stringstream header("HEDOM 2\n");
    CHECK_THROWS_AS(read_domain(header), Error);
  }

  TEST_CASE("random domains are reproducible") {
    const auto a = build_random_domain(9, 4);
    const auto b = build_random_domain(9, 4);
    CHECK(a.vertices() == b.vertices());
    CHECK(a.v_start() == b.v_start());
  }
}
