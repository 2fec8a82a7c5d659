#pragma once
// Dense reference solver for small Dirichlet problems.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "he/lattice.hpp"

namespace test_oracle {

// Gaussian elimination with partial pivoting; a is row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

// Harmonic extension of `values` from the vertices with fixed[id] != 0,
// using only neighbour lookups by coordinates.
inline std::vector<double> dense_extension(const he::LatticeDomain& d, const std::vector<std::uint8_t>& fixed,
                                           const std::vector<double>& values) {
  std::vector<int> local(d.vertex_count(), -1);
  std::vector<int> free;
  for (std::size_t id = 0; id < d.vertex_count(); ++id) {
    if (!fixed[id]) {
      local[id] = static_cast<int>(free.size());
      free.push_back(static_cast<int>(id));
    }
  }
  const std::size_t n = free.size();
  std::vector<double> a(n * n, 0.0), b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const he::Vertex v = d.vertex(free[i]);
    a[i * n + i] = 6.0;
    for (const auto& dir : he::kDirections) {
      const int u = d.id_of(v + dir);
      if (local[static_cast<std::size_t>(u)] >= 0) {
        a[i * n + static_cast<std::size_t>(local[static_cast<std::size_t>(u)])] -= 1.0;
      } else {
        b[i] += values[static_cast<std::size_t>(u)];
      }
    }
  }
  const auto x = dense_solve(std::move(a), std::move(b));
  std::vector<double> out = values;
  for (std::size_t i = 0; i < n; ++i) out[static_cast<std::size_t>(free[i])] = x[i];
  return out;
}

}  // namespace test_oracle
