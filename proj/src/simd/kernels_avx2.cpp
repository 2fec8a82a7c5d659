// AVX2 variants. Compiled with -mavx2 only (no FMA) so each lane performs
// exactly the operations of the scalar reference.

#include "he/simd/kernels.hpp"

#include <immintrin.h>

namespace he::simd::detail {
namespace {

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpby_avx2(const double* x, double b, double* y, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = 0.0;
  for (double v : lanes) r = v > r ? v : r;
  for (; i < n; ++i) {
    const double v = x[i] < 0 ? -x[i] : x[i];
    r = v > r ? v : r;
  }
  return r;
}

void laplacian6_avx2(const std::int32_t* nbr, const double* x, double* y, std::size_t n) {
  const __m256d six = _mm256_set1_pd(6.0);
  // Lane stride through the neighbour table: row i+j starts at 6 (i+j).
  const __m128i lane = _mm_setr_epi32(0, 6, 12, 18);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const std::int32_t* base = nbr + 6 * i;
    __m256d s = _mm256_i32gather_pd(x, _mm_i32gather_epi32(base, lane, 4), 8);
    for (int k = 1; k < 6; ++k) {
      const __m128i idx = _mm_i32gather_epi32(base + k, lane, 4);
      s = _mm256_add_pd(s, _mm256_i32gather_pd(x, idx, 8));
    }
    _mm256_storeu_pd(y + i, _mm256_sub_pd(_mm256_mul_pd(six, _mm256_loadu_pd(x + i)), s));
  }
  for (; i < n; ++i) {
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

void slit_map_avx2(double* re, double* im, std::size_t n, double w, double c) {
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(re + i), vw);
    const __m256d dy = _mm256_loadu_pd(im + i);
    const __m256d a = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), vc);
    const __m256d b = _mm256_mul_pd(_mm256_mul_pd(two, dx), dy);
    const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)));
    const __m256d abs_a = _mm256_andnot_pd(sign, a);
    const __m256d s = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_add_pd(r, abs_a), half));
    const __m256d two_s = _mm256_mul_pd(two, s);

    // a >= 0 branch
    const __m256d sr_pos = s;
    const __m256d si_pos = _mm256_div_pd(b, two_s);
    // a < 0 branch
    const __m256d sr_neg = _mm256_div_pd(_mm256_andnot_pd(sign, b), two_s);
    const __m256d si_neg = _mm256_or_pd(_mm256_and_pd(sign, b), s);

    const __m256d a_nonneg = _mm256_cmp_pd(a, zero, _CMP_GE_OQ);
    __m256d sr = _mm256_blendv_pd(sr_neg, sr_pos, a_nonneg);
    __m256d si = _mm256_blendv_pd(si_neg, si_pos, a_nonneg);
    const __m256d s_zero = _mm256_cmp_pd(s, zero, _CMP_EQ_OQ);
    sr = _mm256_blendv_pd(sr, zero, s_zero);
    si = _mm256_blendv_pd(si, zero, s_zero);

    const __m256d si_neg_mask = _mm256_cmp_pd(si, zero, _CMP_LT_OQ);
    const __m256d si_zero_mask = _mm256_cmp_pd(si, zero, _CMP_EQ_OQ);
    const __m256d wrong_side = _mm256_cmp_pd(_mm256_mul_pd(sr, dx), zero, _CMP_LT_OQ);
    const __m256d flip = _mm256_or_pd(si_neg_mask, _mm256_and_pd(si_zero_mask, wrong_side));
    const __m256d flip_bits = _mm256_and_pd(flip, sign);
    sr = _mm256_xor_pd(sr, flip_bits);
    si = _mm256_xor_pd(si, flip_bits);

    _mm256_storeu_pd(re + i, _mm256_add_pd(vw, sr));
    _mm256_storeu_pd(im + i, si);
  }
  for (; i < n; ++i) slit_map_point(re[i], im[i], w, c);
}

}  // namespace

const KernelTable avx2_table{
    dot_avx2, axpy_avx2, xpby_avx2, max_abs_avx2, laplacian6_avx2, slit_map_avx2,
};

}  // namespace he::simd::detail
