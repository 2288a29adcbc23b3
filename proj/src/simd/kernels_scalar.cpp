#include <bit>

#include "l2gap/simd/kernels.hpp"

namespace l2gap::simd {
namespace {

double masked_sum(const double* row, const std::uint64_t* words, std::size_t n) {
  double sum = 0.0;
  const std::size_t n_words = (n + 63) / 64;
  for (std::size_t w = 0; w < n_words; ++w) {
    std::uint64_t bits = words[w];
    if (const std::size_t rem = n - 64 * w; rem < 64) bits &= (std::uint64_t{1} << rem) - 1;
    while (bits != 0) {
      sum += row[64 * w + static_cast<std::size_t>(std::countr_zero(bits))];
      bits &= bits - 1;
    }
  }
  return sum;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rotate(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

constexpr Kernels kScalar{Isa::scalar, masked_sum, axpy, rotate, dot};

}  // namespace

const Kernels& scalar_kernels() noexcept { return kScalar; }

}  // namespace l2gap::simd
