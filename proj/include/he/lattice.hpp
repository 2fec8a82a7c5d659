#pragma once
// Triangular grid, lattice domains with marked boundary data, and the small
// geometric primitives the explorer walks on.
//
// Vertices carry exact axial coordinates (a, b) embedded at a + b e^{i pi/3};
// floating point only appears at the geometry boundary (embed, centroids,
// inradius).

#include <array>
#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace he {

using Complex = std::complex<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vertex {
  int a = 0;
  int b = 0;
  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
  constexpr Vertex operator+(const Vertex& o) const { return {a + o.a, b + o.b}; }
  constexpr Vertex operator-(const Vertex& o) const { return {a - o.a, b - o.b}; }
};

std::ostream& operator<<(std::ostream& os, const Vertex& v);

// The six unit steps in counterclockwise order starting at direction 1.
inline constexpr std::array<Vertex, 6> kDirections{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

// Index into kDirections of v - u, or -1 when the vertices are not adjacent.
int direction_index(const Vertex& u, const Vertex& v);
inline bool adjacent(const Vertex& u, const Vertex& v) { return direction_index(u, v) >= 0; }

Complex embed(const Vertex& v);

struct DirectedEdge {
  Vertex tail;
  Vertex head;
  friend constexpr auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

inline DirectedEdge rev(const DirectedEdge& e) { return {e.head, e.tail}; }

// An undirected lattice edge, identified by its midpoint. Endpoints are
// stored in increasing (a, b) order.
class EdgeMidpoint {
 public:
  EdgeMidpoint(Vertex u, Vertex v);
  const Vertex& first() const { return u_; }
  const Vertex& second() const { return v_; }
  Complex position() const { return 0.5 * (embed(u_) + embed(v_)); }
  bool has_endpoint(const Vertex& w) const { return w == u_ || w == v_; }
  friend constexpr auto operator<=>(const EdgeMidpoint&, const EdgeMidpoint&) = default;

 private:
  Vertex u_;
  Vertex v_;
};

// An elementary triangle. Up triangles are {p, p+(1,0), p+(0,1)}; down
// triangles are {p, p+(1,-1), p+(1,0)}. vertices() is counterclockwise.
struct Triangle {
  Vertex base;
  bool up = true;

  std::array<Vertex, 3> vertices() const;
  Complex centroid() const;
  bool contains_edge(const EdgeMidpoint& m) const;
  // The vertex not on the given edge; the edge must belong to the triangle.
  Vertex opposite(const EdgeMidpoint& m) const;
  friend constexpr auto operator<=>(const Triangle&, const Triangle&) = default;

  static Triangle from_vertices(Vertex p, Vertex q, Vertex r);
};

// The two triangles sharing an edge: left of (first -> second), then right.
std::array<Triangle, 2> triangles_on_edge(const EdgeMidpoint& m);

class LatticeDomain;

// The triangle across m from `previous`. Without `previous` the triangle on
// the interior side of the boundary edge m is returned, which requires a
// domain.
Triangle triangle_across(const EdgeMidpoint& m, const Triangle& previous);
Triangle triangle_across(const EdgeMidpoint& m, const LatticeDomain& d);

// A simply connected lattice domain with marked boundary edges. Immutable.
//
// Vertex ids: interior vertices are 0 .. interior_count()-1, boundary
// vertices follow in boundary-cycle order.
class LatticeDomain {
 public:
  // Builds and validates a domain. The boundary cycle may be given in either
  // orientation and is stored counterclockwise; v_start and v_end must be
  // distinct edges of the cycle.
  static LatticeDomain from_boundary(std::vector<Vertex> cycle, const EdgeMidpoint& v_start,
                                     const EdgeMidpoint& v_end);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t interior_count() const { return interior_count_; }
  std::size_t boundary_count() const { return vertices_.size() - interior_count_; }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(int id) const { return vertices_[static_cast<std::size_t>(id)]; }
  bool is_interior(int id) const { return id >= 0 && static_cast<std::size_t>(id) < interior_count_; }
  bool is_boundary(int id) const { return static_cast<std::size_t>(id) >= interior_count_; }

  // Id of a vertex of the closed domain, or -1.
  int id_of(const Vertex& v) const;
  bool contains(const Vertex& v) const { return id_of(v) >= 0; }

  // Neighbour ids of a vertex in direction order; -1 where the neighbour
  // lies outside the closed domain.
  const std::array<int, 6>& neighbors(int id) const { return neighbors_[static_cast<std::size_t>(id)]; }

  // Boundary vertices, counterclockwise.
  std::vector<Vertex> boundary_cycle() const;
  const EdgeMidpoint& v_start() const { return v_start_; }
  const EdgeMidpoint& v_end() const { return v_end_; }
  const std::vector<Vertex>& arc_plus() const { return arc_plus_; }
  const std::vector<Vertex>& arc_minus() const { return arc_minus_; }
  // Boundary colouring h0 indexed by vertex id (interior entries are 0 and
  // meaningless).
  int h0(int id) const { return h0_[static_cast<std::size_t>(id)]; }

  // Whether an undirected lattice edge has its relative interior inside the
  // open domain, or lies on its boundary.
  bool edge_in_open_domain(const Vertex& u, const Vertex& v) const;
  bool edge_on_boundary(const Vertex& u, const Vertex& v) const;
  // Edge contained in the closed domain.
  bool edge_in_closure(const Vertex& u, const Vertex& v) const {
    return edge_in_open_domain(u, v) || edge_on_boundary(u, v);
  }

  bool triangle_inside(const Triangle& t) const;
  std::size_t triangle_count() const { return triangle_count_; }

  // Strict point-in-polygon for the boundary polygon.
  bool point_inside(Complex z) const;
  // Distance from z to the complement of the open domain.
  double inradius(Complex z) const;

 private:
  LatticeDomain() = default;

  std::vector<Vertex> vertices_;
  std::size_t interior_count_ = 0;
  std::vector<std::array<int, 6>> neighbors_;
  std::vector<int> grid_;  // axial bounding box -> id
  int amin_ = 0, bmin_ = 0, awidth_ = 0, bheight_ = 0;
  std::vector<Complex> polygon_;
  EdgeMidpoint v_start_{{0, 0}, {1, 0}};
  EdgeMidpoint v_end_{{0, 0}, {1, 0}};
  std::vector<Vertex> arc_plus_;
  std::vector<Vertex> arc_minus_;
  std::vector<std::uint8_t> h0_;
  std::size_t triangle_count_ = 0;
};

// Rectangle-like box: `width` vertices on the bottom row, `height` rows of
// edges above it, zigzag sides. v_start is bottom edge number split_offset
// (counted from the left); v_end the top edge in the same column. With
// split_offset = (width - 2) / 2, even width and even height, the domain is
// mirror symmetric about the vertical line through both marked edges.
LatticeDomain build_box_domain(int width, int height, std::optional<int> split_offset = std::nullopt);

// Regular lattice hexagon of the given radius centred at the origin, marked
// at the bottom and top sides.
LatticeDomain build_hexagon_domain(int radius);

// A random simply connected domain grown from triangles; roughly scale^2
// triangles. Marked edges are random distinct boundary edges.
LatticeDomain build_random_domain(int scale, std::uint64_t seed);

// HEDOM 1 text format.
void write_domain(std::ostream& os, const LatticeDomain& d);
LatticeDomain read_domain(std::istream& is);
void save_domain(const std::string& path, const LatticeDomain& d);
LatticeDomain load_domain(const std::string& path);

}  // namespace he

template <>
struct std::hash<he::Vertex> {
  std::size_t operator()(const he::Vertex& v) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.a)) << 32) |
                                      static_cast<std::uint32_t>(v.b));
  }
};
