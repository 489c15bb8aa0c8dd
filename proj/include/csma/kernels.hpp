#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel primitives for schedule-distribution arithmetic. Every
// operation has a scalar reference implementation and, on x86-64, an AVX2
// variant; the active backend is chosen once at startup (override with
// CSMA_OPT_SIMD=scalar|avx2|auto). Variants must agree within floating-point
// reassociation tolerance; tests/test_kernels.cpp enforces this.
namespace csma::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();
bool cpu_supports_avx2();

/// Max of x[0..n), n >= 1.
double reduce_max(const double* x, std::size_t n);

/// out[i] = exp(x[i] - shift); returns the sum of out.
double exp_shift_sum(const double* x, std::size_t n, double shift, double* out);

/// x[i] *= c.
void scale(double* x, std::size_t n, double c);

/// out[i] = sum of w[b] over bits b set in masks[i]; bits >= nbits ignored.
void mask_dot(const std::uint32_t* masks, std::size_t n, const double* w,
              unsigned nbits, double* out);

/// out[b] = sum of x[i] over i with bit b set in masks[i], b in [0, nbits).
void bit_sums(const std::uint32_t* masks, std::size_t n, const double* x,
              unsigned nbits, double* out);

// Scalar reference implementations (always available; used directly by the
// equivalence tests).
namespace ref {
double reduce_max(const double* x, std::size_t n);
double exp_shift_sum(const double* x, std::size_t n, double shift, double* out);
void scale(double* x, std::size_t n, double c);
void mask_dot(const std::uint32_t* masks, std::size_t n, const double* w,
              unsigned nbits, double* out);
void bit_sums(const std::uint32_t* masks, std::size_t n, const double* x,
              unsigned nbits, double* out);
}  // namespace ref

#if defined(CSMA_HAVE_AVX2)
// AVX2 variants; call only when cpu_supports_avx2() is true.
namespace avx2 {
double reduce_max(const double* x, std::size_t n);
double exp_shift_sum(const double* x, std::size_t n, double shift, double* out);
void scale(double* x, std::size_t n, double c);
void mask_dot(const std::uint32_t* masks, std::size_t n, const double* w,
              unsigned nbits, double* out);
void bit_sums(const std::uint32_t* masks, std::size_t n, const double* x,
              unsigned nbits, double* out);
}  // namespace avx2
#endif

}  // namespace csma::kern
