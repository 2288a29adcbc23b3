#include <cstdlib>
#include <string>

#include "l2gap/error.hpp"
#include "l2gap/simd/kernels.hpp"
#include "variants.hpp"

namespace l2gap::simd {
namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
      // NEON is mandatory on AArch64.
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Kernels* table(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
      return detail::avx2_table();
    case Isa::neon:
      return detail::neon_table();
  }
  return nullptr;
}

const Kernels& select_best() {
  if (const char* pinned = std::getenv("L2GAP_SIMD"); pinned != nullptr && *pinned != '\0') {
    const auto isa = parse_isa(pinned);
    if (!isa) throw Error(ErrorCode::BadParams, std::string("unknown L2GAP_SIMD value '") + pinned + "'");
    return kernels_for(*isa);
  }
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (available(isa)) return *table(isa);
  return scalar_kernels();
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (name == isa_name(isa)) return isa;
  return std::nullopt;
}

bool available(Isa isa) noexcept { return table(isa) != nullptr && cpu_has(isa); }

const Kernels& kernels_for(Isa isa) {
  if (!available(isa))
    throw Error(ErrorCode::BadParams,
                "kernel variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
  return *table(isa);
}

const Kernels& best_kernels() {
  static const Kernels& best = select_best();
  return best;
}

}  // namespace l2gap::simd
