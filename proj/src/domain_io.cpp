#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "he/lattice.hpp"

namespace he {

void write_domain(std::ostream& os, const LatticeDomain& d) {
  os << "HEDOM 1\n";
  const std::size_t first = d.interior_count();
  for (std::size_t i = first; i < d.vertex_count(); ++i) {
    const auto& v = d.vertex(static_cast<int>(i));
    os << v.a << ' ' << v.b << ' ' << d.h0(static_cast<int>(i)) << '\n';
  }
  auto edge = [&](const char* tag, const EdgeMidpoint& m) {
    os << tag << ' ' << m.first().a << ' ' << m.first().b << ' ' << m.second().a << ' ' << m.second().b << '\n';
  };
  edge("VSTART", d.v_start());
  edge("VEND", d.v_end());
}

LatticeDomain read_domain(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "HEDOM 1") throw Error("domain file: missing 'HEDOM 1' header");
  std::vector<Vertex> cycle;
  std::vector<int> colours;
  std::optional<EdgeMidpoint> start;
  std::optional<EdgeMidpoint> end;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    auto fail = [&](const std::string& why) {
      return Error("domain file line " + std::to_string(lineno) + ": " + why);
    };
    if (line.rfind("VSTART", 0) == 0 || line.rfind("VEND", 0) == 0) {
      std::string tag;
      Vertex u, v;
      if (!(ls >> tag >> u.a >> u.b >> v.a >> v.b)) throw fail("malformed edge record");
      if (!adjacent(u, v)) throw fail("marked edge endpoints are not adjacent");
      (tag == "VSTART" ? start : end) = EdgeMidpoint(u, v);
      continue;
    }
    Vertex v;
    int h = 0;
    std::string extra;
    if (!(ls >> v.a >> v.b >> h) || (ls >> extra)) throw fail("expected 'a b h0'");
    if (h != 0 && h != 1) throw fail("h0 must be 0 or 1");
    cycle.push_back(v);
    colours.push_back(h);
  }
  if (!start || !end) throw Error("domain file: VSTART and VEND records are required");

  auto d = LatticeDomain::from_boundary(cycle, *start, *end);
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const int id = d.id_of(cycle[i]);
    if (d.h0(id) != colours[i]) {
      std::ostringstream msg;
      msg << "domain file: h0 of boundary vertex " << cycle[i] << " contradicts the marked arcs";
      throw Error(msg.str());
    }
  }
  return d;
}

void save_domain(const std::string& path, const LatticeDomain& d) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  write_domain(os, d);
}

LatticeDomain load_domain(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot read " + path);
  return read_domain(is);
}

}  // namespace he
