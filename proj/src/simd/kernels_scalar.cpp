#include "he/simd/kernels.hpp"

#include <cmath>

namespace he::simd::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby_scalar(const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

void laplacian6_scalar(const std::int32_t* nbr, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t* k = nbr + 6 * i;
    double s = x[k[0]];
    s += x[k[1]];
    s += x[k[2]];
    s += x[k[3]];
    s += x[k[4]];
    s += x[k[5]];
    y[i] = 6.0 * x[i] - s;
  }
}

void slit_map_scalar(double* re, double* im, std::size_t n, double w, double c) {
  for (std::size_t i = 0; i < n; ++i) slit_map_point(re[i], im[i], w, c);
}

}  // namespace

const KernelTable scalar_table{
    dot_scalar, axpy_scalar, xpby_scalar, max_abs_scalar, laplacian6_scalar, slit_map_scalar,
};

}  // namespace he::simd::detail
