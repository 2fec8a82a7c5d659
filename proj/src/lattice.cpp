#include "he/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "he/rng.hpp"

namespace he {
namespace {

constexpr double kHalfSqrt3 = 0.86602540378443864676;

double segment_distance(Complex z, Complex p, Complex q) {
  const Complex d = q - p;
  const double len2 = std::norm(d);
  double t = len2 > 0 ? ((z - p) * std::conj(d)).real() / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (p + t * d));
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const Vertex& v) { return os << '(' << v.a << ',' << v.b << ')'; }

int direction_index(const Vertex& u, const Vertex& v) {
  const Vertex d = v - u;
  for (int k = 0; k < 6; ++k) {
    if (kDirections[static_cast<std::size_t>(k)] == d) return k;
  }
  return -1;
}

Complex embed(const Vertex& v) { return {v.a + 0.5 * v.b, kHalfSqrt3 * v.b}; }

EdgeMidpoint::EdgeMidpoint(Vertex u, Vertex v) : u_(std::min(u, v)), v_(std::max(u, v)) {
  if (!adjacent(u, v)) throw Error("EdgeMidpoint: vertices are not adjacent");
}

std::array<Vertex, 3> Triangle::vertices() const {
  if (up) return {base, base + Vertex{1, 0}, base + Vertex{0, 1}};
  return {base, base + Vertex{1, -1}, base + Vertex{1, 0}};
}

Complex Triangle::centroid() const {
  const auto v = vertices();
  return (embed(v[0]) + embed(v[1]) + embed(v[2])) / 3.0;
}

bool Triangle::contains_edge(const EdgeMidpoint& m) const {
  const auto v = vertices();
  const bool a = std::find(v.begin(), v.end(), m.first()) != v.end();
  const bool b = std::find(v.begin(), v.end(), m.second()) != v.end();
  return a && b;
}

Vertex Triangle::opposite(const EdgeMidpoint& m) const {
  if (!contains_edge(m)) throw Error("Triangle::opposite: edge not on triangle");
  for (const auto& v : vertices()) {
    if (!m.has_endpoint(v)) return v;
  }
  throw Error("Triangle::opposite: degenerate triangle");
}

Triangle Triangle::from_vertices(Vertex p, Vertex q, Vertex r) {
  if (!adjacent(p, q) || !adjacent(q, r) || !adjacent(r, p)) {
    throw Error("Triangle::from_vertices: vertices are not mutually adjacent");
  }
  std::array<Vertex, 3> want{p, q, r};
  std::sort(want.begin(), want.end());
  for (const Vertex& base : want) {
    for (bool up : {true, false}) {
      Triangle t{base, up};
      auto have = t.vertices();
      std::sort(have.begin(), have.end());
      if (have == want) return t;
    }
  }
  throw Error("Triangle::from_vertices: not an elementary triangle");
}

std::array<Triangle, 2> triangles_on_edge(const EdgeMidpoint& m) {
  const Vertex& u = m.first();
  const Vertex& v = m.second();
  const int k = direction_index(u, v);
  const Vertex left = u + kDirections[static_cast<std::size_t>((k + 1) % 6)];
  const Vertex right = u + kDirections[static_cast<std::size_t>((k + 5) % 6)];
  return {Triangle::from_vertices(u, v, left), Triangle::from_vertices(u, v, right)};
}

Triangle triangle_across(const EdgeMidpoint& m, const Triangle& previous) {
  const auto both = triangles_on_edge(m);
  if (both[0] == previous) return both[1];
  if (both[1] == previous) return both[0];
  throw Error("triangle_across: previous triangle does not border the edge");
}

Triangle triangle_across(const EdgeMidpoint& m, const LatticeDomain& d) {
  const auto both = triangles_on_edge(m);
  const bool in0 = d.triangle_inside(both[0]);
  const bool in1 = d.triangle_inside(both[1]);
  if (in0 && !in1) return both[0];
  if (in1 && !in0) return both[1];
  if (!in0) throw Error("triangle_across: edge lies on the outer face only");
  throw Error("triangle_across: edge is interior, a previous triangle is required");
}

LatticeDomain LatticeDomain::from_boundary(std::vector<Vertex> cycle, const EdgeMidpoint& v_start,
                                           const EdgeMidpoint& v_end) {
  const std::size_t n = cycle.size();
  if (n < 3) throw Error("domain: boundary cycle needs at least 3 vertices");
  {
    std::unordered_set<Vertex> seen;
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen.insert(cycle[i]).second) throw Error("domain: boundary cycle is not simple");
      if (!adjacent(cycle[i], cycle[(i + 1) % n])) throw Error("domain: boundary cycle has a non-lattice step");
    }
  }
  // Orientation from twice the signed area, in exact integer arithmetic:
  // 2x = 2a + b, y ~ b.
  long long area2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex& p = cycle[i];
    const Vertex& q = cycle[(i + 1) % n];
    area2 += static_cast<long long>(2 * p.a + p.b) * q.b - static_cast<long long>(2 * q.a + q.b) * p.b;
  }
  if (area2 == 0) throw Error("domain: boundary cycle encloses no area");
  if (area2 < 0) std::reverse(cycle.begin(), cycle.end());

  LatticeDomain d;
  d.polygon_.reserve(n);
  for (const auto& v : cycle) d.polygon_.push_back(embed(v));

  int amin = std::numeric_limits<int>::max(), amax = std::numeric_limits<int>::min();
  int bmin = amin, bmax = amax;
  for (const auto& v : cycle) {
    amin = std::min(amin, v.a);
    amax = std::max(amax, v.a);
    bmin = std::min(bmin, v.b);
    bmax = std::max(bmax, v.b);
  }
  d.amin_ = amin;
  d.bmin_ = bmin;
  d.awidth_ = amax - amin + 1;
  d.bheight_ = bmax - bmin + 1;

  std::unordered_set<Vertex> on_cycle(cycle.begin(), cycle.end());
  // Exact crossing test: a ray to the right from a lattice vertex at row pb
  // crosses the edges that step between rows pb and pb + 1 at the endpoint
  // lying on row pb.
  auto vertex_inside = [&](const Vertex& p) {
    bool inside = false;
    const int px2 = 2 * p.a + p.b;
    for (std::size_t i = 0; i < n; ++i) {
      const Vertex& u = cycle[i];
      const Vertex& v = cycle[(i + 1) % n];
      if ((u.b > p.b) != (v.b > p.b)) {
        const Vertex& on_row = u.b == p.b ? u : v;
        if (2 * on_row.a + on_row.b > px2) inside = !inside;
      }
    }
    return inside;
  };
  std::vector<Vertex> interior;
  for (int b = bmin; b <= bmax; ++b) {
    for (int a = amin; a <= amax; ++a) {
      const Vertex p{a, b};
      if (!on_cycle.count(p) && vertex_inside(p)) interior.push_back(p);
    }
  }
  if (interior.empty()) throw Error("domain: no interior vertices");

  d.interior_count_ = interior.size();
  d.vertices_ = interior;
  d.vertices_.insert(d.vertices_.end(), cycle.begin(), cycle.end());
  d.grid_.assign(static_cast<std::size_t>(d.awidth_) * static_cast<std::size_t>(d.bheight_), -1);
  for (std::size_t i = 0; i < d.vertices_.size(); ++i) {
    const auto& v = d.vertices_[i];
    d.grid_[static_cast<std::size_t>(v.a - amin) + static_cast<std::size_t>(v.b - bmin) * d.awidth_] =
        static_cast<int>(i);
  }
  d.neighbors_.resize(d.vertices_.size());
  for (std::size_t i = 0; i < d.vertices_.size(); ++i) {
    for (int k = 0; k < 6; ++k) {
      d.neighbors_[i][static_cast<std::size_t>(k)] = d.id_of(d.vertices_[i] + kDirections[static_cast<std::size_t>(k)]);
    }
  }
  for (std::size_t i = 0; i < d.interior_count_; ++i) {
    for (int nb : d.neighbors_[i]) {
      if (nb < 0) throw Error("domain: interior vertex with a neighbour outside the closure");
    }
  }
  // Interior connectivity.
  {
    std::vector<char> seen(d.interior_count_, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int nb : d.neighbors_[static_cast<std::size_t>(u)]) {
        if (d.is_interior(nb) && !seen[static_cast<std::size_t>(nb)]) {
          seen[static_cast<std::size_t>(nb)] = 1;
          ++reached;
          queue.push_back(nb);
        }
      }
    }
    if (reached != d.interior_count_) throw Error("domain: interior is not connected");
  }

  auto edge_position = [&](const EdgeMidpoint& m) -> std::size_t {
    for (std::size_t i = 0; i < n; ++i) {
      if (EdgeMidpoint(cycle[i], cycle[(i + 1) % n]) == m) return i;
    }
    throw Error("domain: marked edge is not a boundary edge");
  };
  const std::size_t s = edge_position(v_start);
  const std::size_t e = edge_position(v_end);
  if (s == e) throw Error("domain: v_start and v_end must lie on distinct edges");
  d.v_start_ = v_start;
  d.v_end_ = v_end;
  d.h0_.assign(d.vertices_.size(), 0);
  for (std::size_t i = (s + 1) % n;; i = (i + 1) % n) {
    d.arc_plus_.push_back(cycle[i]);
    d.h0_[d.interior_count_ + i] = 1;
    if (i == e) break;
  }
  for (std::size_t i = (e + 1) % n;; i = (i + 1) % n) {
    d.arc_minus_.push_back(cycle[i]);
    if (i == s) break;
  }

  for (int b = bmin - 1; b <= bmax; ++b) {
    for (int a = amin - 1; a <= amax; ++a) {
      for (bool up : {true, false}) {
        if (d.triangle_inside(Triangle{{a, b}, up})) ++d.triangle_count_;
      }
    }
  }
  return d;
}

int LatticeDomain::id_of(const Vertex& v) const {
  const int a = v.a - amin_;
  const int b = v.b - bmin_;
  if (a < 0 || b < 0 || a >= awidth_ || b >= bheight_) return -1;
  return grid_[static_cast<std::size_t>(a) + static_cast<std::size_t>(b) * awidth_];
}

std::vector<Vertex> LatticeDomain::boundary_cycle() const {
  return {vertices_.begin() + static_cast<std::ptrdiff_t>(interior_count_), vertices_.end()};
}

bool LatticeDomain::edge_on_boundary(const Vertex& u, const Vertex& v) const {
  const int iu = id_of(u);
  const int iv = id_of(v);
  if (!is_boundary(iu) || !is_boundary(iv) || iu < 0 || iv < 0) return false;
  const auto n = static_cast<long>(boundary_count());
  const long pu = iu - static_cast<long>(interior_count_);
  const long pv = iv - static_cast<long>(interior_count_);
  const long diff = ((pu - pv) % n + n) % n;
  return diff == 1 || diff == n - 1;
}

bool LatticeDomain::edge_in_open_domain(const Vertex& u, const Vertex& v) const {
  if (!adjacent(u, v)) return false;
  const int iu = id_of(u);
  const int iv = id_of(v);
  if (iu < 0 || iv < 0) return false;
  if (is_interior(iu) || is_interior(iv)) return true;
  if (edge_on_boundary(u, v)) return false;
  return point_inside(0.5 * (embed(u) + embed(v)));
}

bool LatticeDomain::triangle_inside(const Triangle& t) const {
  for (const auto& v : t.vertices()) {
    if (!contains(v)) return false;
  }
  return point_inside(t.centroid());
}

bool LatticeDomain::point_inside(Complex z) const {
  const std::size_t n = polygon_.size();
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex p = polygon_[i];
    const Complex q = polygon_[(i + 1) % n];
    if (segment_distance(z, p, q) < 1e-12) return false;
    if ((p.imag() > z.imag()) != (q.imag() > z.imag())) {
      const double x = p.real() + (z.imag() - p.imag()) * (q.real() - p.real()) / (q.imag() - p.imag());
      if (x > z.real()) inside = !inside;
    }
  }
  return inside;
}

double LatticeDomain::inradius(Complex z) const {
  if (!point_inside(z)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = polygon_.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, segment_distance(z, polygon_[i], polygon_[(i + 1) % n]));
  return best;
}

LatticeDomain build_box_domain(int width, int height, std::optional<int> split_offset) {
  if (width < 4 || height < 2) throw Error("box domain: need width >= 4 and height >= 2");
  const int k = split_offset.value_or((width - 2) / 2);
  if (k < 0 || k > width - 2) throw Error("box domain: split offset outside the bottom row");
  auto a_left = [](int b) { return -(b / 2); };
  auto a_right = [width](int b) { return width - 1 - (b + 1) / 2; };

  std::vector<Vertex> cycle;
  for (int a = 0; a <= width - 1; ++a) cycle.push_back({a, 0});
  for (int b = 1; b <= height - 1; ++b) cycle.push_back({a_right(b), b});
  for (int a = a_right(height); a >= a_left(height); --a) cycle.push_back({a, height});
  for (int b = height - 1; b >= 1; --b) cycle.push_back({a_left(b), b});

  const EdgeMidpoint start({k, 0}, {k + 1, 0});
  // Top edge centred over the bottom one (even height) or half a step to the
  // right of it (odd height, clamped into the row).
  int top_left_x2;  // twice the x coordinate of the left endpoint
  if (height % 2 == 0) {
    top_left_x2 = 2 * k;
  } else {
    top_left_x2 = 2 * k + 1;
    if (top_left_x2 + 2 > 2 * (width - 1) - 1) top_left_x2 = 2 * k - 1;
  }
  const int top_a = (top_left_x2 - height) / 2;
  const EdgeMidpoint end({top_a, height}, {top_a + 1, height});
  return LatticeDomain::from_boundary(std::move(cycle), start, end);
}

LatticeDomain build_hexagon_domain(int radius) {
  if (radius < 2) throw Error("hexagon domain: radius must be at least 2");
  std::vector<Vertex> cycle;
  Vertex v{0, -radius};
  for (int side = 0; side < 6; ++side) {
    for (int j = 0; j < radius; ++j) {
      cycle.push_back(v);
      v = v + kDirections[static_cast<std::size_t>(side)];
    }
  }
  const int j = (radius - 1) / 2;
  const EdgeMidpoint start({j, -radius}, {j + 1, -radius});
  const int m = radius - j - 1;
  const EdgeMidpoint end({-m, radius}, {-m - 1, radius});
  return LatticeDomain::from_boundary(std::move(cycle), start, end);
}

namespace {

struct TriangleAnimal {
  std::set<Triangle> triangles;
  std::map<Vertex, int> vertex_use;

  void add(const Triangle& t) {
    triangles.insert(t);
    for (const auto& v : t.vertices()) ++vertex_use[v];
  }

  bool has(const Triangle& t) const { return triangles.count(t) > 0; }

  // Directed boundary edges with the animal on their left.
  std::vector<DirectedEdge> boundary_edges() const {
    std::vector<DirectedEdge> out;
    for (const auto& t : triangles) {
      const auto v = t.vertices();
      for (int i = 0; i < 3; ++i) {
        const Vertex& p = v[static_cast<std::size_t>(i)];
        const Vertex& q = v[static_cast<std::size_t>((i + 1) % 3)];
        const auto across = triangle_across(EdgeMidpoint(p, q), t);
        if (!has(across)) out.push_back({p, q});
      }
    }
    return out;
  }
};

}  // namespace

LatticeDomain build_random_domain(int scale, std::uint64_t seed) {
  if (scale < 2) throw Error("random domain: scale must be at least 2");
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    RandomStream rng(seed, Purpose::DomainGeneration, attempt);
    TriangleAnimal animal;
    for (int k = 0; k < 6; ++k) {
      animal.add(Triangle::from_vertices({0, 0}, kDirections[static_cast<std::size_t>(k)],
                                         kDirections[static_cast<std::size_t>((k + 1) % 6)]));
    }
    const std::size_t target = static_cast<std::size_t>(scale) * static_cast<std::size_t>(scale);
    std::size_t stalls = 0;
    while (animal.triangles.size() < target && stalls < 100 * target) {
      const auto edges = animal.boundary_edges();
      const auto& e = edges[rng.next_below(edges.size())];
      const Triangle inside = Triangle::from_vertices(
          e.tail, e.head, e.tail + kDirections[static_cast<std::size_t>((direction_index(e.tail, e.head) + 1) % 6)]);
      const Triangle t = triangle_across(EdgeMidpoint(e.tail, e.head), inside);
      const Vertex z = t.opposite(EdgeMidpoint(e.tail, e.head));
      int shared = 0;
      for (const Vertex& w : {e.tail, e.head}) {
        if (animal.has(triangle_across(EdgeMidpoint(w, z), t))) ++shared;
      }
      const bool z_new = animal.vertex_use.find(z) == animal.vertex_use.end();
      // Attaching along one edge to a fresh vertex, or filling a notch whose
      // apex is a boundary vertex, keeps the animal a topological disk.
      if ((shared == 0 && z_new) || shared == 1) {
        animal.add(t);
      } else {
        ++stalls;
      }
    }
    const auto edges = animal.boundary_edges();
    std::map<Vertex, Vertex> next;
    bool pinched = false;
    for (const auto& e : edges) pinched |= !next.emplace(e.tail, e.head).second;
    if (pinched) continue;
    std::vector<Vertex> cycle{edges.front().tail};
    for (Vertex v = next.at(cycle.front()); v != cycle.front(); v = next.at(v)) cycle.push_back(v);
    if (cycle.size() != edges.size()) continue;
    const std::size_t n = cycle.size();
    const std::size_t s = rng.next_below(n);
    std::size_t e = rng.next_below(n - 1);
    if (e >= s) ++e;
    try {
      return LatticeDomain::from_boundary(cycle, EdgeMidpoint(cycle[s], cycle[(s + 1) % n]),
                                          EdgeMidpoint(cycle[e], cycle[(e + 1) % n]));
    } catch (const Error&) {
      continue;
    }
  }
  throw Error("random domain: could not grow a valid domain");
}

}  // namespace he
