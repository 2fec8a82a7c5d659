#include "he/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace he {

WalkOracle::WalkOracle(const LatticeDomain& d, std::span<const Vertex> killed, std::size_t max_free)
    : domain_(&d), absorbing_(d.vertex_count(), 0) {
  for (std::size_t id = d.interior_count(); id < d.vertex_count(); ++id) absorbing_[id] = 1;
  for (const auto& k : killed) {
    const int id = d.id_of(k);
    if (id < 0) throw Error("oracle: killed vertex outside the domain");
    absorbing_[static_cast<std::size_t>(id)] = 1;
  }
  for (std::size_t id = 0; id < d.vertex_count(); ++id) {
    if (!absorbing_[id]) free_.push_back(d.vertex(static_cast<int>(id)));
  }
  if (free_.size() > max_free) throw Error("oracle: too many free vertices");
  const std::size_t m = free_.size();
  std::vector<double> q(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& dir : kDirections) {
      const int j = index(free_[i] + dir);
      if (j >= 0) q[i * m + static_cast<std::size_t>(j)] += 1.0 / 6.0;
    }
  }
  n_.assign(m * m, 0.0);
  std::vector<double> term(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) term[i * m + i] = 1.0;
  std::vector<double> next(m * m);
  for (int k = 0; k < 1000000; ++k) {
    double largest = 0.0;
    for (std::size_t i = 0; i < m * m; ++i) {
      n_[i] += term[i];
      largest = std::max(largest, term[i]);
    }
    if (largest < 1e-18) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t l = 0; l < m; ++l) {
        const double a = term[i * m + l];
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) next[i * m + j] += a * q[l * m + j];
      }
    }
    term.swap(next);
  }
}

int WalkOracle::index(const Vertex& v) const {
  const auto it = std::find(free_.begin(), free_.end(), v);
  return it == free_.end() ? -1 : static_cast<int>(it - free_.begin());
}

double WalkOracle::visits(const Vertex& v, const Vertex& w) const {
  const int i = index(v);
  const int j = index(w);
  if (i < 0 || j < 0) throw Error("oracle: vertex not free");
  return n_[static_cast<std::size_t>(i) * free_.size() + static_cast<std::size_t>(j)];
}

double WalkOracle::exit_probability(int i, std::span<const DirectedEdge> edges) const {
  double p = 0.0;
  for (const auto& e : edges) {
    const int x = index(e.tail);
    const int w = domain_->id_of(e.head);
    if (x < 0 || w < 0 || !absorbing_[static_cast<std::size_t>(w)] || !adjacent(e.tail, e.head)) continue;
    p += n_[static_cast<std::size_t>(i) * free_.size() + static_cast<std::size_t>(x)] / 6.0;
  }
  return p;
}

double WalkOracle::harmonic_measure(const Vertex& v, std::span<const DirectedEdge> edges) const {
  const int i = index(v);
  if (i < 0) throw Error("oracle: start not free");
  return exit_probability(i, edges);
}

double WalkOracle::total_mass(std::span<const DirectedEdge> e1, std::span<const DirectedEdge> e2) const {
  double mass = 0.0;
  for (const auto& e : e1) {
    const int u = index(e.head);
    if (u >= 0) {
      mass += exit_probability(u, e2) / 6.0;
    } else if (std::find(e2.begin(), e2.end(), e) != e2.end()) {
      mass += 1.0 / 6.0;
    }
  }
  return mass;
}

double WalkOracle::visit_integral(std::span<const DirectedEdge> e1, const Vertex& v) const {
  const int j = index(v);
  if (j < 0) throw Error("oracle: vertex not free");
  double s = 0.0;
  for (const auto& e : e1) {
    const int u = index(e.head);
    if (u >= 0) s += n_[static_cast<std::size_t>(u) * free_.size() + static_cast<std::size_t>(j)] / 6.0;
  }
  return s;
}

}  // namespace he
