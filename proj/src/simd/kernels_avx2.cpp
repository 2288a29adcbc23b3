// Compiled with -mavx2 (and without -mfma, so products round the same way as
// the scalar reference). Only reached after a runtime CPU check.

#include "variants.hpp"

#if defined(L2GAP_HAVE_AVX2)

#include <immintrin.h>

#include <array>

namespace l2gap::simd::detail {
namespace {

// Lane masks for every 4-bit pattern; lane i is all-ones when bit i is set.
struct LaneMasks {
  alignas(32) std::array<std::array<long long, 4>, 16> lanes{};
  constexpr LaneMasks() {
    for (int m = 0; m < 16; ++m)
      for (int i = 0; i < 4; ++i) lanes[m][i] = ((m >> i) & 1) ? -1LL : 0LL;
  }
};
constexpr LaneMasks kLaneMasks{};

inline __m256i lane_mask(unsigned bits) {
  return _mm256_load_si256(reinterpret_cast<const __m256i*>(kLaneMasks.lanes[bits & 15u].data()));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double masked_sum(const double* row, const std::uint64_t* words, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < n; j += 4) {
    unsigned bits = static_cast<unsigned>(words[j / 64] >> (j % 64)) & 15u;
    if (const std::size_t rem = n - j; rem < 4) bits &= (1u << rem) - 1u;
    if (bits == 0) continue;
    // Masked lanes are not read, so the tail never touches memory past n.
    acc = _mm256_add_pd(acc, _mm256_maskload_pd(row + j, lane_mask(bits)));
  }
  return hsum(acc);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void rotate(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, xi), _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, xi), _mm256_mul_pd(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  double sum = hsum(acc);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

constexpr Kernels kAvx2{Isa::avx2, masked_sum, axpy, rotate, dot};

}  // namespace

const Kernels* avx2_table() noexcept { return &kAvx2; }

}  // namespace l2gap::simd::detail

#else

namespace l2gap::simd::detail {
const Kernels* avx2_table() noexcept { return nullptr; }
}  // namespace l2gap::simd::detail

#endif
