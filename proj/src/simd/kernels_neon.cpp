#include "variants.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace l2gap::simd::detail {
namespace {

double masked_sum(const double* row, const std::uint64_t* words, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  const float64x2_t zero = vdupq_n_f64(0.0);
  for (std::size_t j = 0; j < n; j += 2) {
    unsigned bits = static_cast<unsigned>(words[j / 64] >> (j % 64)) & 3u;
    if (n - j < 2) {
      if (bits & 1u) acc = vaddq_f64(acc, vsetq_lane_f64(row[j], zero, 0));
      break;
    }
    if (bits == 0) continue;
    const uint64x2_t lanes = {(bits & 1u) ? ~0ull : 0ull, (bits & 2u) ? ~0ull : 0ull};
    acc = vaddq_f64(acc, vbslq_f64(lanes, vld1q_f64(row + j), zero));
  }
  return vaddvq_f64(acc);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

void rotate(double* x, double* y, double c, double s, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xi = vld1q_f64(x + i);
    const float64x2_t yi = vld1q_f64(y + i);
    vst1q_f64(x + i, vsubq_f64(vmulq_f64(vc, xi), vmulq_f64(vs, yi)));
    vst1q_f64(y + i, vaddq_f64(vmulq_f64(vs, xi), vmulq_f64(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double sum = vaddvq_f64(acc);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

constexpr Kernels kNeon{Isa::neon, masked_sum, axpy, rotate, dot};

}  // namespace

const Kernels* neon_table() noexcept { return &kNeon; }

}  // namespace l2gap::simd::detail

#else

namespace l2gap::simd::detail {
const Kernels* neon_table() noexcept { return nullptr; }
}  // namespace l2gap::simd::detail

#endif
