#include "he/harmonic.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "he/rng.hpp"
#include "he/simd/kernels.hpp"

namespace he {
namespace {

// Free-vertex system in ELL form: six neighbour slots per row, fixed
// neighbours pointing at a zero sentinel slot (index n).
struct DirichletSystem {
  std::vector<int> free;
  std::vector<int> local;
  std::vector<std::int32_t> nbr;
  std::vector<double> rhs;

  std::size_t size() const { return free.size(); }
};

DirichletSystem build_system(const LatticeDomain& d, const std::vector<std::uint8_t>& fixed,
                             const VertexFunction* values) {
  DirichletSystem s;
  s.local.assign(d.vertex_count(), -1);
  for (std::size_t id = 0; id < d.vertex_count(); ++id) {
    if (fixed[id]) continue;
    if (d.is_boundary(static_cast<int>(id))) throw Error("harmonic: boundary vertex left unfixed");
    s.local[id] = static_cast<int>(s.free.size());
    s.free.push_back(static_cast<int>(id));
  }
  const auto n = static_cast<std::int32_t>(s.free.size());
  s.nbr.resize(6 * s.free.size());
  s.rhs.assign(s.free.size(), 0.0);
  for (std::size_t i = 0; i < s.free.size(); ++i) {
    const auto& nb = d.neighbors(s.free[i]);
    for (int k = 0; k < 6; ++k) {
      const int u = nb[static_cast<std::size_t>(k)];
      const int li = s.local[static_cast<std::size_t>(u)];
      s.nbr[6 * i + static_cast<std::size_t>(k)] = li >= 0 ? li : n;
      if (li < 0 && values) s.rhs[i] += (*values)[static_cast<std::size_t>(u)];
    }
  }
  return s;
}

double domain_radius(const LatticeDomain& d) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& v : d.vertices()) {
    const Complex z = embed(v);
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  }
  return 0.5 * std::hypot(xmax - xmin, ymax - ymin);
}

double target_defect(const LatticeDomain& d, const SolverConfig& cfg) {
  const double r = domain_radius(d);
  return cfg.tolerance / std::max(1.0, r * r / 10.0);
}

// Residual b - A x into r (x carries the sentinel slot).
void residual(const DirichletSystem& s, const std::vector<double>& x, std::vector<double>& r) {
  const std::size_t n = s.size();
  simd::laplacian6(s.nbr.data(), x.data(), r.data(), n);
  for (std::size_t i = 0; i < n; ++i) r[i] = s.rhs[i] - r[i];
}

std::vector<double> solve_cg(const DirichletSystem& s, std::vector<double> x, double target, int max_iter) {
  const std::size_t n = s.size();
  x.resize(n + 1);
  x[n] = 0.0;
  std::vector<double> r(n), p(n + 1, 0.0), ap(n);
  residual(s, x, r);
  double defect = simd::max_abs(r.data(), n) / 6.0;
  if (defect <= target) return x;
  std::copy(r.begin(), r.end(), p.begin());
  double rr = simd::dot(r.data(), r.data(), n);
  for (int it = 0; it < max_iter; ++it) {
    simd::laplacian6(s.nbr.data(), p.data(), ap.data(), n);
    const double pap = simd::dot(p.data(), ap.data(), n);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    simd::axpy(alpha, p.data(), x.data(), n);
    simd::axpy(-alpha, ap.data(), r.data(), n);
    defect = simd::max_abs(r.data(), n) / 6.0;
    if (defect <= target) {
      // Confirm against the true residual; the recurrence drifts.
      residual(s, x, r);
      defect = simd::max_abs(r.data(), n) / 6.0;
      if (defect <= target) return x;
      std::copy(r.begin(), r.end(), p.begin());
      rr = simd::dot(r.data(), r.data(), n);
      continue;
    }
    const double rr_new = simd::dot(r.data(), r.data(), n);
    simd::xpby(r.data(), rr_new / rr, p.data(), n);
    rr = rr_new;
  }
  residual(s, x, r);
  defect = simd::max_abs(r.data(), n) / 6.0;
  if (defect <= target) return x;
  throw ConvergenceError("conjugate gradient did not converge", defect, max_iter);
}

std::vector<double> solve_gauss_seidel(const DirichletSystem& s, std::vector<double> x, double target, int max_iter) {
  const std::size_t n = s.size();
  x.resize(n + 1);
  x[n] = 0.0;
  std::vector<double> r(n);
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::int32_t* k = s.nbr.data() + 6 * i;
      double sum = x[static_cast<std::size_t>(k[0])];
      for (int j = 1; j < 6; ++j) sum += x[static_cast<std::size_t>(k[j])];
      x[i] = (s.rhs[i] + sum) / 6.0;
    }
    if (sweep % 16 == 0 || sweep == max_iter) {
      residual(s, x, r);
      const double defect = simd::max_abs(r.data(), n) / 6.0;
      if (defect <= target) return x;
      if (sweep == max_iter) throw ConvergenceError("Gauss-Seidel did not converge", defect, sweep);
    }
  }
  residual(s, x, r);
  throw ConvergenceError("Gauss-Seidel did not converge", simd::max_abs(r.data(), n) / 6.0, max_iter);
}

struct EigenLdlt {
  Eigen::SparseMatrix<double> matrix;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

  explicit EigenLdlt(const DirichletSystem& s) {
    const std::size_t n = s.size();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(7 * n);
    for (std::size_t i = 0; i < n; ++i) {
      trips.emplace_back(static_cast<int>(i), static_cast<int>(i), 6.0);
      for (int k = 0; k < 6; ++k) {
        const std::int32_t j = s.nbr[6 * i + static_cast<std::size_t>(k)];
        if (static_cast<std::size_t>(j) < n) trips.emplace_back(static_cast<int>(i), j, -1.0);
      }
    }
    matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    matrix.setFromTriplets(trips.begin(), trips.end());
    ldlt.compute(matrix);
    if (ldlt.info() != Eigen::Success) throw Error("sparse Cholesky factorisation failed");
  }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Eigen::VectorXd x = ldlt.solve(b);
    return {x.data(), x.data() + x.size()};
  }
};

std::vector<double> solve_monte_carlo(const LatticeDomain& d, const DirichletSystem& s,
                                      const std::vector<std::uint8_t>& fixed, const VertexFunction& values,
                                      const SolverConfig& cfg) {
  if (cfg.mc_walks < 1) throw Error("Monte Carlo solver: mc_walks must be positive");
  std::vector<double> x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    RandomStream rng(cfg.mc_seed, Purpose::RandomWalk, static_cast<std::uint64_t>(s.free[i]));
    double acc = 0.0;
    for (int w = 0; w < cfg.mc_walks; ++w) {
      int at = s.free[i];
      while (!fixed[static_cast<std::size_t>(at)]) at = d.neighbors(at)[rng.next_below(6)];
      acc += values[static_cast<std::size_t>(at)];
    }
    x[i] = acc / cfg.mc_walks;
  }
  return x;
}

std::vector<double> solve_system(const LatticeDomain& d, const DirichletSystem& s,
                                 const std::vector<std::uint8_t>& fixed, const VertexFunction& values,
                                 const SolverConfig& cfg, const VertexFunction* guess) {
  if (!(cfg.tolerance > 0.0)) throw Error("solver tolerance must be positive");
  std::vector<double> x0(s.size(), 0.0);
  if (guess) {
    for (std::size_t i = 0; i < s.size(); ++i) x0[i] = (*guess)[static_cast<std::size_t>(s.free[i])];
  }
  switch (cfg.method) {
    case SolverMethod::DirectSparse: return EigenLdlt(s).solve(s.rhs);
    case SolverMethod::ConjugateGradient:
      return solve_cg(s, std::move(x0), target_defect(d, cfg), cfg.max_iterations);
    case SolverMethod::GaussSeidel:
      return solve_gauss_seidel(s, std::move(x0), target_defect(d, cfg), cfg.max_iterations);
    case SolverMethod::MonteCarlo: return solve_monte_carlo(d, s, fixed, values, cfg);
  }
  throw Error("unknown solver method");
}

}  // namespace

double HarmonicField::value(const Vertex& v) const {
  const int id = domain_->id_of(v);
  if (id < 0) throw Error("HarmonicField: vertex outside the domain");
  return value(id);
}

std::size_t HarmonicField::free_count() const {
  return static_cast<std::size_t>(std::count(fixed_.begin(), fixed_.end(), std::uint8_t{0}));
}

double HarmonicField::mean_value_defect() const {
  double worst = 0.0;
  for (std::size_t id = 0; id < values_.size(); ++id) {
    if (fixed_[id]) continue;
    double sum = 0.0;
    for (int nb : domain_->neighbors(static_cast<int>(id))) sum += values_[static_cast<std::size_t>(nb)];
    worst = std::max(worst, std::fabs(values_[id] - sum / 6.0));
  }
  return worst;
}

HarmonicField harmonic_extension(DomainPtr d, std::vector<std::uint8_t> fixed_mask, VertexFunction values,
                                 const SolverConfig& cfg, const VertexFunction* initial_guess) {
  if (fixed_mask.size() != d->vertex_count() || values.size() != d->vertex_count()) {
    throw Error("harmonic_extension: mask/value size mismatch");
  }
  if (std::none_of(fixed_mask.begin(), fixed_mask.end(), [](std::uint8_t f) { return f != 0; })) {
    throw Error("harmonic_extension: empty fixed set");
  }
  const DirichletSystem s = build_system(*d, fixed_mask, &values);
  if (s.size() > 0) {
    const auto x = solve_system(*d, s, fixed_mask, values, cfg, cfg.warm_start ? initial_guess : nullptr);
    for (std::size_t i = 0; i < s.size(); ++i) values[static_cast<std::size_t>(s.free[i])] = x[i];
  }
  return HarmonicField(std::move(d), std::move(fixed_mask), std::move(values));
}

HarmonicField harmonic_extension(DomainPtr d, const FixedValues& fixed, const SolverConfig& cfg) {
  std::vector<std::uint8_t> mask(d->vertex_count(), 0);
  VertexFunction values(d->vertex_count(), 0.0);
  for (const auto& [v, x] : fixed) {
    const int id = d->id_of(v);
    if (id < 0) throw Error("harmonic_extension: fixed vertex outside the domain");
    mask[static_cast<std::size_t>(id)] = 1;
    values[static_cast<std::size_t>(id)] = x;
  }
  return harmonic_extension(std::move(d), std::move(mask), std::move(values), cfg);
}

HarmonicField refix(const HarmonicField& field, const Vertex& v, double value, const SolverConfig& cfg) {
  const int id = field.domain().id_of(v);
  if (id < 0) throw Error("refix: vertex outside the domain");
  if (field.is_fixed(id)) {
    if (field.value(id) != value) throw Error("refix: vertex already fixed at a different value");
    return field;
  }
  auto mask = field.fixed_mask();
  auto values = field.values();
  mask[static_cast<std::size_t>(id)] = 1;
  values[static_cast<std::size_t>(id)] = value;
  const VertexFunction guess = values;
  return harmonic_extension(field.domain_ptr(), std::move(mask), std::move(values), cfg, &guess);
}

std::vector<std::uint8_t> vertex_mask(const LatticeDomain& d, std::span<const Vertex> vs) {
  std::vector<std::uint8_t> mask(d.vertex_count(), 0);
  for (const auto& v : vs) {
    const int id = d.id_of(v);
    if (id < 0) throw Error("vertex outside the domain");
    mask[static_cast<std::size_t>(id)] = 1;
  }
  return mask;
}

std::vector<std::uint8_t> absorbing_mask(const LatticeDomain& d, std::span<const Vertex> killed) {
  auto mask = vertex_mask(d, killed);
  for (std::size_t id = d.interior_count(); id < d.vertex_count(); ++id) mask[id] = 1;
  return mask;
}

struct DirichletFactorization::Impl {
  DirichletSystem system;
  EigenLdlt ldlt;
  explicit Impl(DirichletSystem s) : system(std::move(s)), ldlt(system) {}
};

DirichletFactorization::DirichletFactorization(const LatticeDomain& d, const std::vector<std::uint8_t>& absorbing)
    : domain_(&d), absorbing_(absorbing) {
  DirichletSystem s = build_system(d, absorbing, nullptr);
  free_ = s.free;
  local_ = s.local;
  if (!free_.empty()) impl_ = std::make_unique<Impl>(std::move(s));
}

DirichletFactorization::~DirichletFactorization() = default;

std::vector<double> DirichletFactorization::solve(const std::vector<double>& rhs) const {
  if (rhs.size() != free_.size()) throw Error("DirichletFactorization::solve: size mismatch");
  if (!impl_) return {};
  return impl_->ldlt.solve(rhs);
}

std::vector<double> DirichletFactorization::green_column(int id) const {
  const int li = local_index(id);
  if (li < 0) throw Error("green: source vertex is not free");
  std::vector<double> rhs(free_.size(), 0.0);
  rhs[static_cast<std::size_t>(li)] = 6.0;
  return solve(rhs);
}

VertexFunction DirichletFactorization::extend(const VertexFunction& absorbing_values) const {
  VertexFunction out(domain_->vertex_count(), 0.0);
  for (std::size_t id = 0; id < out.size(); ++id) {
    if (absorbing_[id]) out[id] = absorbing_values[id];
  }
  if (!impl_) return out;
  std::vector<double> rhs(free_.size(), 0.0);
  for (std::size_t i = 0; i < free_.size(); ++i) {
    for (int nb : domain_->neighbors(free_[i])) {
      if (absorbing_[static_cast<std::size_t>(nb)]) rhs[i] += absorbing_values[static_cast<std::size_t>(nb)];
    }
  }
  const auto x = impl_->ldlt.solve(rhs);
  for (std::size_t i = 0; i < free_.size(); ++i) out[static_cast<std::size_t>(free_[i])] = x[i];
  return out;
}

VertexFunction green(const LatticeDomain& d, std::span<const Vertex> killed, const Vertex& v) {
  const auto absorbing = absorbing_mask(d, killed);
  const int id = d.id_of(v);
  if (id < 0 || absorbing[static_cast<std::size_t>(id)]) throw Error("green: source must be a free vertex");
  DirichletFactorization f(d, absorbing);
  const auto col = f.green_column(id);
  VertexFunction out(d.vertex_count(), 0.0);
  for (std::size_t i = 0; i < col.size(); ++i) out[static_cast<std::size_t>(f.id_of_local(i))] = col[i];
  return out;
}

std::vector<DirectedEdge> exit_edges(const LatticeDomain& d, std::span<const Vertex> killed) {
  const auto absorbing = absorbing_mask(d, killed);
  std::vector<DirectedEdge> out;
  for (std::size_t id = 0; id < d.interior_count(); ++id) {
    if (absorbing[id]) continue;
    for (int nb : d.neighbors(static_cast<int>(id))) {
      if (absorbing[static_cast<std::size_t>(nb)]) out.push_back({d.vertex(static_cast<int>(id)), d.vertex(nb)});
    }
  }
  return out;
}

namespace {

std::set<DirectedEdge> validated_exit_set(const LatticeDomain& d, const std::vector<std::uint8_t>& absorbing,
                                          std::span<const DirectedEdge> edges) {
  std::set<DirectedEdge> out;
  for (const auto& e : edges) {
    const int h = d.id_of(e.head);
    if (!adjacent(e.tail, e.head) || h < 0 || d.id_of(e.tail) < 0) {
      throw Error("harmonic measure: edge is not a lattice edge of the closed domain");
    }
    if (!absorbing[static_cast<std::size_t>(h)]) throw Error("harmonic measure: edge head is not absorbing");
    if (!d.edge_in_open_domain(e.tail, e.head)) throw Error("harmonic measure: edge lies outside the domain");
    out.insert(e);
  }
  return out;
}

}  // namespace

double harmonic_measure_edges(const LatticeDomain& d, std::span<const Vertex> killed, const Vertex& v,
                              std::span<const DirectedEdge> edges) {
  const auto absorbing = absorbing_mask(d, killed);
  const auto set = validated_exit_set(d, absorbing, edges);
  if (set.empty()) return 0.0;
  const int id = d.id_of(v);
  if (id < 0 || absorbing[static_cast<std::size_t>(id)]) throw Error("harmonic measure: start must be free");
  DirichletFactorization f(d, absorbing);
  const auto g = f.green_column(id);
  double h = 0.0;
  for (const auto& e : set) {
    const int li = f.local_index(d.id_of(e.tail));
    if (li >= 0) h += g[static_cast<std::size_t>(li)] / 6.0;
  }
  return h;
}

McEstimate mc_hit_estimate(const LatticeDomain& d, std::span<const Vertex> killed, const Vertex& v,
                           std::span<const DirectedEdge> edges, std::int64_t n_walks, std::uint64_t seed) {
  if (n_walks < 1) throw Error("mc_hit_estimate: n_walks must be at least 1");
  const auto absorbing = absorbing_mask(d, killed);
  const auto set = validated_exit_set(d, absorbing, edges);
  const int start = d.id_of(v);
  if (start < 0 || absorbing[static_cast<std::size_t>(start)]) throw Error("mc_hit_estimate: start must be free");
  std::int64_t hits = 0;
  for (std::int64_t w = 0; w < n_walks; ++w) {
    RandomStream rng(seed, Purpose::RandomWalk, static_cast<std::uint64_t>(w));
    int prev = start;
    int at = start;
    while (!absorbing[static_cast<std::size_t>(at)]) {
      prev = at;
      at = d.neighbors(at)[rng.next_below(6)];
    }
    if (set.count({d.vertex(prev), d.vertex(at)})) ++hits;
  }
  McEstimate est;
  est.walks = n_walks;
  est.value = static_cast<double>(hits) / static_cast<double>(n_walks);
  est.standard_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n_walks));
  return est;
}

void write_field(std::ostream& os, const HarmonicField& f) {
  os << "HEFIELD 1\n";
  os.precision(17);
  for (std::size_t id = 0; id < f.values().size(); ++id) {
    const auto& v = f.domain().vertex(static_cast<int>(id));
    os << v.a << ' ' << v.b << ' ' << f.values()[id] << '\n';
  }
}

}  // namespace he
