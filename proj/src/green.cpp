#include "he/green.hpp"

#include <cmath>

#include "he/simd/kernels.hpp"

namespace he {

GreenCache::GreenCache(DomainPtr d, double window_radius) : domain_(std::move(d)) {
  const auto& dom = *domain_;
  std::vector<std::uint8_t> absorbing(dom.vertex_count(), 0);
  VertexFunction data(dom.vertex_count(), 0.0);
  for (std::size_t id = dom.interior_count(); id < dom.vertex_count(); ++id) {
    absorbing[id] = 1;
    data[id] = dom.h0(static_cast<int>(id));
  }
  factor_ = std::make_unique<DirichletFactorization>(dom, absorbing);
  h0_ = factor_->extend(data);

  const Complex centre = dom.v_start().position();
  window_index_.assign(dom.vertex_count(), -1);
  for (std::size_t id = 0; id < dom.interior_count(); ++id) {
    if (window_radius > 0.0 && std::abs(embed(dom.vertex(static_cast<int>(id))) - centre) > window_radius) continue;
    window_index_[id] = static_cast<int>(window_.size());
    window_.push_back(static_cast<int>(id));
  }
  columns_.resize(window_.size());
  once_ = std::make_unique<std::once_flag[]>(window_.size());
}

const std::vector<double>& GreenCache::window_column(int id) const {
  const int wi = window_index(id);
  if (wi < 0) throw Error("GreenCache: vertex outside the cached window");
  const auto k = static_cast<std::size_t>(wi);
  std::call_once(once_[k], [&] {
    const auto full = factor_->green_column(id);
    std::vector<double> col(window_.size());
    for (std::size_t i = 0; i < window_.size(); ++i) col[i] = full[static_cast<std::size_t>(window_[i])];
    columns_[k] = std::move(col);
  });
  return columns_[k];
}

std::vector<double> GreenCache::full_column(int id) const { return factor_->green_column(id); }

CapacitanceSolver::CapacitanceSolver(const GreenCache& cache) : cache_(cache) {}

void CapacitanceSolver::green_row(int id) {
  const std::size_t k = fixed_.size();
  row_.resize(k);
  if (cache_.window_index(id) >= 0) {
    const auto& col = cache_.window_column(id);
    for (std::size_t j = 0; j < k; ++j) {
      const int p = fixed_[j];
      const int wi = cache_.window_index(p);
      row_[j] = wi >= 0 ? col[static_cast<std::size_t>(wi)] : outside_.at(p)[static_cast<std::size_t>(id)];
    }
    diag_ = col[static_cast<std::size_t>(cache_.window_index(id))];
    return;
  }
  auto it = outside_.find(id);
  if (it == outside_.end()) it = outside_.emplace(id, cache_.full_column(id)).first;
  const auto& col = it->second;
  for (std::size_t j = 0; j < k; ++j) row_[j] = col[static_cast<std::size_t>(fixed_[j])];
  diag_ = col[static_cast<std::size_t>(id)];
}

double CapacitanceSolver::value(int id) {
  if (!cache_.domain().is_interior(id)) throw Error("CapacitanceSolver: vertex is not interior");
  green_row(id);
  const std::size_t k = fixed_.size();
  z_.resize(k);
  const double* l = factor_.data();
  for (std::size_t i = 0; i < k; ++i) {
    z_[i] = (row_[i] - simd::dot(l, z_.data(), i)) / l[i];
    l += i + 1;
  }
  z_for_ = id;
  return cache_.h0()[static_cast<std::size_t>(id)] + simd::dot(z_.data(), y_.data(), k);
}

void CapacitanceSolver::fix(int id, double c) {
  if (z_for_ != id) value(id);
  const std::size_t k = fixed_.size();
  const double pivot = diag_ - simd::dot(z_.data(), z_.data(), k);
  if (!(pivot > 0.0)) throw Error("CapacitanceSolver: vertex already fixed or lost positivity");
  const double lkk = std::sqrt(pivot);
  const double residual = c - cache_.h0()[static_cast<std::size_t>(id)] - simd::dot(z_.data(), y_.data(), k);
  factor_.insert(factor_.end(), z_.begin(), z_.end());
  factor_.push_back(lkk);
  y_.push_back(residual / lkk);
  fixed_.push_back(id);
  z_for_ = -1;
}

}  // namespace he
