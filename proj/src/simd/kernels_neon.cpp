// NEON (AArch64) variants: two double lanes per register, used as a pair of
// registers so the four-way reduction order matches the scalar reference.

#include "he/simd/kernels.hpp"

#include <arm_neon.h>

namespace he::simd::detail {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);  // partial sums s0, s1
  float64x2_t hi = vdupq_n_f64(0.0);  // partial sums s2, s3
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double s = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) + (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpby_neon(const double* x, double b, double* y, std::size_t n) {
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(x + i), vmulq_f64(vb, vld1q_f64(y + i))));
  }
  for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vgetq_lane_f64(m, 0);
  const double r1 = vgetq_lane_f64(m, 1);
  r = r1 > r ? r1 : r;
  for (; i < n; ++i) {
    const double v = x[i] < 0 ? -x[i] : x[i];
    r = v > r ? v : r;
  }
  return r;
}

void laplacian6_neon(const std::int32_t* nbr, const double* x, double* y, std::size_t n) {
  // No gather on NEON; the row loop is the scalar one, vectorised over the
  // final 6 x - s update only.
  std::size_t i = 0;
  const float64x2_t six = vdupq_n_f64(6.0);
  for (; i + 2 <= n; i += 2) {
    double s[2];
    for (int j = 0; j < 2; ++j) {
      const std::int32_t* k = nbr + 6 * (i + j);
      double t = x[k[0]];
      t += x[k[1]];
      t += x[k[2]];
      t += x[k[3]];
      t += x[k[4]];
      t += x[k[5]];
      s[j] = t;
    }
    vst1q_f64(y + i, vsubq_f64(vmulq_f64(six, vld1q_f64(x + i)), vld1q_f64(s)));
  }
  for (; i < n; ++i) {
    const std::int32_t* k = nbr + 6 * i;
    double t = x[k[0]];
    t += x[k[1]];
    t += x[k[2]];
    t += x[k[3]];
    t += x[k[4]];
    t += x[k[5]];
    y[i] = 6.0 * x[i] - t;
  }
}

void slit_map_neon(double* re, double* im, std::size_t n, double w, double c) {
  const float64x2_t vw = vdupq_n_f64(w);
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t two = vdupq_n_f64(2.0);
  const float64x2_t half = vdupq_n_f64(0.5);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const uint64x2_t sign = vdupq_n_u64(0x8000000000000000ULL);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(re + i), vw);
    const float64x2_t dy = vld1q_f64(im + i);
    const float64x2_t a = vaddq_f64(vsubq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)), vc);
    const float64x2_t b = vmulq_f64(vmulq_f64(two, dx), dy);
    const float64x2_t r = vsqrtq_f64(vaddq_f64(vmulq_f64(a, a), vmulq_f64(b, b)));
    const float64x2_t s = vsqrtq_f64(vmulq_f64(vaddq_f64(r, vabsq_f64(a)), half));
    const float64x2_t two_s = vmulq_f64(two, s);

    const float64x2_t si_pos = vdivq_f64(b, two_s);
    const float64x2_t sr_neg = vdivq_f64(vabsq_f64(b), two_s);
    const float64x2_t si_neg = vreinterpretq_f64_u64(
        vorrq_u64(vandq_u64(sign, vreinterpretq_u64_f64(b)), vreinterpretq_u64_f64(s)));

    const uint64x2_t a_nonneg = vcgeq_f64(a, zero);
    float64x2_t sr = vbslq_f64(a_nonneg, s, sr_neg);
    float64x2_t si = vbslq_f64(a_nonneg, si_pos, si_neg);
    const uint64x2_t s_zero = vceqq_f64(s, zero);
    sr = vbslq_f64(s_zero, zero, sr);
    si = vbslq_f64(s_zero, zero, si);

    const uint64x2_t flip = vorrq_u64(vcltq_f64(si, zero),
                                      vandq_u64(vceqq_f64(si, zero), vcltq_f64(vmulq_f64(sr, dx), zero)));
    const uint64x2_t flip_bits = vandq_u64(flip, sign);
    sr = vreinterpretq_f64_u64(veorq_u64(vreinterpretq_u64_f64(sr), flip_bits));
    si = vreinterpretq_f64_u64(veorq_u64(vreinterpretq_u64_f64(si), flip_bits));

    vst1q_f64(re + i, vaddq_f64(vw, sr));
    vst1q_f64(im + i, si);
  }
  for (; i < n; ++i) slit_map_point(re[i], im[i], w, c);
}

}  // namespace

const KernelTable neon_table{
    dot_neon, axpy_neon, xpby_neon, max_abs_neon, laplacian6_neon, slit_map_neon,
};

}  // namespace he::simd::detail
