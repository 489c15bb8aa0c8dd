#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "csma/kernels.hpp"

// AVX2 + FMA variants of the kernels. Translation unit compiled with
// -mavx2 -mfma; the dispatcher guards every call with a cpuid check.
namespace csma::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

// exp for 4 lanes. Cody-Waite reduction x = k*ln2 + r, |r| <= ln2/2, then a
// degree-13 Taylor polynomial of e^r (max term ~4e-18 on that range) and a
// 2^k exponent splice. Inputs below -708 flush to zero; the callers only pass
// shifted log-weights, which are <= 0 and finite.
inline __m256d exp4(__m256d x) {
  const __m256d inv_ln2 = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d underflow = _mm256_set1_pd(-708.0);

  __m256d small = _mm256_cmp_pd(x, underflow, _CMP_LT_OQ);
  x = _mm256_max_pd(x, underflow);

  __m256d k = _mm256_round_pd(_mm256_mul_pd(x, inv_ln2),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  // Horner evaluation of sum r^i / i!, i = 0..13.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^k: |k| <= 1075 here, so int32 conversion is safe.
  __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  __m256i bits = _mm256_slli_epi64(
      _mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  __m256d scale2k = _mm256_castsi256_pd(bits);

  return _mm256_andnot_pd(small, _mm256_mul_pd(p, scale2k));
}

}  // namespace

double reduce_max(const double* x, std::size_t n) {
  std::size_t i = 0;
  double m = x[0];
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4)
      vm = _mm256_max_pd(vm, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vm);
    m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  }
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double exp_shift_sum(const double* x, std::size_t n, double shift,
                     double* out) {
  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = exp4(_mm256_sub_pd(_mm256_loadu_pd(x + i), vshift));
    _mm256_storeu_pd(out + i, v);
    acc = _mm256_add_pd(acc, v);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    out[i] = std::exp(x[i] - shift);
    s += out[i];
  }
  return s;
}

void scale(double* x, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vc));
  for (; i < n; ++i) x[i] *= c;
}

void mask_dot(const std::uint32_t* masks, std::size_t n, const double* w,
              unsigned nbits, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m128i m4 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(masks + i));
    __m256d acc = _mm256_setzero_pd();
    for (unsigned b = 0; b < nbits; ++b) {
      __m128i bit = _mm_set1_epi32(1 << b);
      __m128i hit32 = _mm_cmpeq_epi32(_mm_and_si128(m4, bit), bit);
      __m256i hit64 = _mm256_cvtepi32_epi64(hit32);
      __m256d wb = _mm256_and_pd(_mm256_castsi256_pd(hit64),
                                 _mm256_set1_pd(w[b]));
      acc = _mm256_add_pd(acc, wb);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double s = 0.0;
    for (unsigned b = 0; b < nbits; ++b)
      if (masks[i] & (1u << b)) s += w[b];
    out[i] = s;
  }
}

void bit_sums(const std::uint32_t* masks, std::size_t n, const double* x,
              unsigned nbits, double* out) {
  for (unsigned b = 0; b < nbits; ++b) {
    __m128i bit = _mm_set1_epi32(1 << b);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      __m128i m4 =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(masks + i));
      __m128i hit32 = _mm_cmpeq_epi32(_mm_and_si128(m4, bit), bit);
      __m256i hit64 = _mm256_cvtepi32_epi64(hit32);
      __m256d vx = _mm256_and_pd(_mm256_castsi256_pd(hit64),
                                 _mm256_loadu_pd(x + i));
      acc = _mm256_add_pd(acc, vx);
    }
    double s = hsum(acc);
    for (; i < n; ++i)
      if (masks[i] & (1u << b)) s += x[i];
    out[b] = s;
  }
}

}  // namespace csma::kern::avx2
