#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "l2gap/chain.hpp"
#include "l2gap/simd/kernels.hpp"

namespace l2gap {

/// Indicator over the states of a chain, stored as 64-bit words, with its
/// stationary mass cached. Always nonempty and proper.
class StateSubset {
 public:
  /// Empty placeholder; every factory below yields a nonempty proper set.
  StateSubset() = default;

  /// Throws InvalidSubset when a state is out of range or the set is empty or
  /// the whole space.
  static StateSubset from_states(std::span<const double> pi, std::span<const std::size_t> states);
  static StateSubset from_mask(std::span<const double> pi, std::uint64_t mask);
  static StateSubset from_indicator(std::span<const double> pi, const std::vector<bool>& in);

  std::size_t universe() const noexcept { return n_; }
  bool contains(std::size_t state) const noexcept {
    return (words_[state / 64] >> (state % 64)) & 1u;
  }
  std::size_t count() const noexcept;
  /// pi(A)
  double mass() const noexcept { return mass_; }
  /// pi(A^c), summed directly rather than as 1 - pi(A).
  double complement_mass() const noexcept { return complement_mass_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  /// Low 64 bits; the whole set when universe() <= 64.
  std::uint64_t mask() const noexcept { return words_.empty() ? 0 : words_[0]; }
  std::vector<std::size_t> states() const;

  StateSubset complement(std::span<const double> pi) const;

  /// "{0,2}" with zero-based state indices.
  std::string to_string() const;

  friend bool operator==(const StateSubset& a, const StateSubset& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }
  /// Order by the bit pattern, highest word first; used for tie-breaking.
  friend bool operator<(const StateSubset& a, const StateSubset& b);

 private:
  StateSubset(std::size_t n, std::vector<std::uint64_t> words, std::span<const double> pi);

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
  double mass_ = 0.0;
  double complement_mass_ = 0.0;
};

enum class SubsetFamily {
  strict_half,  // 0 < pi(A) < 1/2
  closed_half,  // 0 < pi(A) <= 1/2
  all_proper,   // 0 < pi(A) < 1
};

enum class CutMode { exact, sweep_heuristic, local_search_heuristic };

enum class Objective { min, max };

std::string_view family_name(SubsetFamily family) noexcept;
std::string_view mode_name(CutMode mode) noexcept;
std::optional<SubsetFamily> parse_family(std::string_view name) noexcept;

/// Membership slack on the pi(A) = 1/2 boundary.
inline constexpr double kHalfMassTol = 1e-12;

bool in_family(double mass, SubsetFamily family) noexcept;

/// An isoperimetric value with the subset that attains it. For inf-type
/// reports the witness lies in `family`; for sup-type reports `family` is
/// all_proper. Heuristic values are one-sided: upper bounds for infima and
/// lower bounds for suprema.
struct CutReport {
  double value = 0.0;
  StateSubset witness;
  std::uint64_t n_steps = 1;
  CutMode mode = CutMode::exact;
  SubsetFamily family = SubsetFamily::closed_half;
};

/// Ergodic flow of the n-step chain, Q^(n)_ij = pi_i p^n_ij.
Matrix n_step_flow(const MarkovChain& chain, std::uint64_t n);

/// sum over x in A, y not in A of pi_x p^n(x, y).
double flow_out(const MarkovChain& chain, const StateSubset& a, std::uint64_t n = 1);
double flow_out(const Matrix& flow, const StateSubset& a) noexcept;

/// flow_out / (pi(A) pi(A^c)); lies in [0, 2].
double k_of_set(const MarkovChain& chain, const StateSubset& a, std::uint64_t n = 1);
double k_of_set(const Matrix& flow, const StateSubset& a) noexcept;

enum class Strategy {
  exact,      // Gray-code enumeration; StateSpaceTooLarge above exact_limit
  heuristic,  // sweep + local search regardless of size
  automatic,  // exact when size <= exact_limit, heuristic otherwise
};

struct CutOptions {
  Strategy strategy = Strategy::exact;
  std::size_t exact_limit = 22;
  /// Workers for exact enumeration; 0 means hardware concurrency.
  unsigned threads = 1;
  /// Kernel variant; nullptr selects simd::best_kernels().
  const simd::Kernels* kernels = nullptr;
  std::uint64_t seed = 0;
  int restarts = 8;
};

/// inf of k_n(A) over `family` (strict_half or closed_half).
/// Throws EmptyFamily when the strict family is empty.
CutReport k_inf(const MarkovChain& chain, std::uint64_t n, SubsetFamily family,
                const CutOptions& options = {});

/// sup of k(A) over all proper subsets.
CutReport K_sup(const MarkovChain& chain, const CutOptions& options = {});

/// Results of one exhaustive pass for a fixed step count.
struct ExactExtremes {
  std::optional<CutReport> inf_strict;  // empty when the strict family is empty
  CutReport inf_closed;
  CutReport sup_all;
};

/// Visits one representative of each {A, A^c} pair (state 0 in A) in Gray
/// order, updating flow and mass by one masked row sum per step.
/// Throws StateSpaceTooLarge when size > options.exact_limit.
ExactExtremes enumerate_extremes(const MarkovChain& chain, std::uint64_t n,
                                 const CutOptions& options = {});

struct SweepBounds {
  CutReport inf_bound;  // upper bound on k_n (closed family)
  CutReport sup_bound;  // lower bound on K_n
};

/// Prefix cuts along the second eigenvector of the symmetrized kernel (and,
/// for the sup side, along the bottom eigenvector). Throws NotReversible.
SweepBounds sweep_cut_bound(const MarkovChain& chain, std::uint64_t n,
                            SubsetFamily inf_family = SubsetFamily::closed_half);

/// Single-flip hill climbing from seeded random subsets. Deterministic in
/// (seed, restarts).
CutReport local_search_bound(const MarkovChain& chain, std::uint64_t n, Objective objective,
                             std::uint64_t seed, int restarts,
                             SubsetFamily inf_family = SubsetFamily::closed_half);

}  // namespace l2gap
