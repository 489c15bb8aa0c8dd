#include "csma/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace csma::kern {

namespace ref {

double reduce_max(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double exp_shift_sum(const double* x, std::size_t n, double shift,
                     double* out) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(x[i] - shift);
    s += out[i];
  }
  return s;
}

void scale(double* x, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

void mask_dot(const std::uint32_t* masks, std::size_t n, const double* w,
              unsigned nbits, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    std::uint32_t m = masks[i];
    for (unsigned b = 0; b < nbits; ++b)
      if (m & (1u << b)) s += w[b];
    out[i] = s;
  }
}

void bit_sums(const std::uint32_t* masks, std::size_t n, const double* x,
              unsigned nbits, double* out) {
  for (unsigned b = 0; b < nbits; ++b) out[b] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t m = masks[i];
    for (unsigned b = 0; b < nbits; ++b)
      if (m & (1u << b)) out[b] += x[i];
  }
}

}  // namespace ref

bool cpu_supports_avx2() {
#if defined(CSMA_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend choose_backend() {
  const char* env = std::getenv("CSMA_OPT_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_supports_avx2())
      return Backend::avx2;
    if (std::strcmp(env, "avx2") == 0) return Backend::scalar;
  }
  return cpu_supports_avx2() ? Backend::avx2 : Backend::scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend b = choose_backend();
  return b;
}

const char* backend_name() {
  return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

double reduce_max(const double* x, std::size_t n) {
#if defined(CSMA_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2::reduce_max(x, n);
#endif
  return ref::reduce_max(x, n);
}

double exp_shift_sum(const double* x, std::size_t n, double shift,
                     double* out) {
#if defined(CSMA_HAVE_AVX2)
  if (active_backend() == Backend::avx2)
    return avx2::exp_shift_sum(x, n, shift, out);
#endif
  return ref::exp_shift_sum(x, n, shift, out);
}

void scale(double* x, std::size_t n, double c) {
#if defined(CSMA_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2::scale(x, n, c);
#endif
  ref::scale(x, n, c);
}

void mask_dot(const std::uint32_t* masks, std::size_t n, const double* w,
              unsigned nbits, double* out) {
#if defined(CSMA_HAVE_AVX2)
  if (active_backend() == Backend::avx2)
    return avx2::mask_dot(masks, n, w, nbits, out);
#endif
  ref::mask_dot(masks, n, w, nbits, out);
}

void bit_sums(const std::uint32_t* masks, std::size_t n, const double* x,
              unsigned nbits, double* out) {
#if defined(CSMA_HAVE_AVX2)
  if (active_backend() == Backend::avx2)
    return avx2::bit_sums(masks, n, x, nbits, out);
#endif
  ref::bit_sums(masks, n, x, nbits, out);
}

}  // namespace csma::kern
