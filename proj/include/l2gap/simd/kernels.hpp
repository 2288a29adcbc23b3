#pragma once

// Runtime-dispatched inner loops. Every variant computes the same quantity as
// the scalar reference; results may differ only by summation order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace l2gap::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

struct Kernels {
  Isa isa;
  /// Sum of row[j] over j < n with bit j of `words` set (64 bits per word).
  double (*masked_sum)(const double* row, const std::uint64_t* words, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// (x, y) <- (c x - s y, s x + c y), elementwise.
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
};

const Kernels& scalar_kernels() noexcept;

/// True when the variant is both compiled in and supported by the running CPU.
bool available(Isa isa) noexcept;

/// Throws l2gap::Error(BadParams) when the variant is unavailable.
const Kernels& kernels_for(Isa isa);

/// Widest available variant; the L2GAP_SIMD environment variable
/// (scalar|avx2|neon) pins a specific one. Resolved once per process.
const Kernels& best_kernels();

}  // namespace l2gap::simd
