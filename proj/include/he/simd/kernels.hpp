#pragma once
// Data-parallel inner loops shared by the solvers, the HE sampler and the
// Loewner code. Every kernel has a scalar reference; vector variants are
// selected at runtime and must agree with it bit for bit.
//
// Reductions use four interleaved partial sums combined as
// (s0 + s1) + (s2 + s3), followed by the tail in index order. The scalar
// reference follows the same order, which is what makes the variants
// interchangeable for reproducibility.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace he::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

// Whether the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);

// The variant used by the dispatching functions below. Defaults to the best
// available one; HE_SIMD=scalar in the environment forces the reference.
Isa active_isa();

// Overrides the dispatch target. Throws if the variant is unavailable.
void set_active_isa(Isa isa);

struct KernelTable {
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = x + b * y
  void (*xpby)(const double* x, double b, double* y, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // y[i] = 6 x[i] - sum_k x[nbr[6 i + k]], neighbours summed in k order.
  // x must have a readable zero slot for the sentinel index.
  void (*laplacian6)(const std::int32_t* nbr, const double* x, double* y, std::size_t n);
  // z <- w + sqrt((z - w)^2 + c), root taken in the closed upper half-plane
  // (for real results, on the same side of w as z). c = 4 dt is the forward
  // vertical-slit map, c = -4 dt its inverse.
  void (*slit_map)(double* re, double* im, std::size_t n, double w, double c);
};

const KernelTable& kernels(Isa isa);

inline const KernelTable& kernels() { return kernels(active_isa()); }

inline double dot(const double* x, const double* y, std::size_t n) { return kernels().dot(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { kernels().axpy(a, x, y, n); }
inline void xpby(const double* x, double b, double* y, std::size_t n) { kernels().xpby(x, b, y, n); }
inline double max_abs(const double* x, std::size_t n) { return kernels().max_abs(x, n); }
inline void laplacian6(const std::int32_t* nbr, const double* x, double* y, std::size_t n) {
  kernels().laplacian6(nbr, x, y, n);
}
inline void slit_map(double* re, double* im, std::size_t n, double w, double c) {
  kernels().slit_map(re, im, n, w, c);
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(HE_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(HE_HAVE_NEON)
extern const KernelTable neon_table;
#endif

// Single-point slit map, the scalar reference body. Exposed so that scalar
// callers (single-point maps in the Loewner code) round exactly like the
// batch kernels.
inline void slit_map_point(double& re, double& im, double w, double c);
}  // namespace detail

}  // namespace he::simd

#include <cmath>

namespace he::simd::detail {

inline void slit_map_point(double& re, double& im, double w, double c) {
  const double dx = re - w;
  const double dy = im;
  const double a = dx * dx - dy * dy + c;
  const double b = 2.0 * dx * dy;
  const double r = std::sqrt(a * a + b * b);
  const double s = std::sqrt((r + std::fabs(a)) * 0.5);
  double sr;
  double si;
  if (s == 0.0) {
    sr = 0.0;
    si = 0.0;
  } else if (a >= 0.0) {
    sr = s;
    si = b / (2.0 * s);
  } else {
    sr = std::fabs(b) / (2.0 * s);
    si = std::copysign(s, b);
  }
  if (si < 0.0 || (si == 0.0 && sr * dx < 0.0)) {
    sr = -sr;
    si = -si;
  }
  re = w + sr;
  im = si;
}

}  // namespace he::simd::detail
