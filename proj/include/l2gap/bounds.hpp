#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2gap/chain.hpp"
#include "l2gap/isoperimetry.hpp"
#include "l2gap/spectral.hpp"

namespace l2gap {

struct BoundParams {
  /// Lawler-Sokal constant; any value >= 1 is accepted, 1 is always valid.
  double kappa = 1.0;
  int grid_points = 32;
  int refine_iterations = 200;
  double shrink = 0.5;
  /// Smallest grid coordinate on every axis.
  double grid_floor = 1e-6;
  double gap_tol = kGapTol;
};

/// Throws DomainError for kappa < 1 or unusable optimizer settings.
void validate(const BoundParams& params);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double margin = 0.0) const noexcept {
    return x >= lo - margin && x <= hi + margin;
  }
};

/// [kappa k^2 / 8, k], the range allowed for the gap at 1.
Interval lawler_sokal_interval(double k, const BoundParams& params = {});

/// [-sqrt(1 - kappa k2^2/8), min(sqrt(1 - kappa k2^2/8), 1 - kappa k^2/8)]:
/// contains every eigenvalue of P except the top one.
Interval spectrum_enclosure(double k, double k2, const BoundParams& params = {});

/// Coordinates of the k2 lower-bound supremum.
struct K2Params {
  double delta = 0.0;  // (0, 1/2)
  double eps1 = 0.0;   // (0, 1)
  double eps2 = 0.0;   // (0, 1)
  double eps = 0.0;    // (0, 1)
  friend bool operator==(const K2Params&, const K2Params&) = default;
};

/// Minimum of the three terms of the k2 lower bound:
///   k^2 delta / 16,
///   (k/4)(eps1 eps2 (1 - delta) - delta),
///   eps (k ((2 - eps)(1 - eps1)(1 - eps2)(1 - delta) / ((1 - eps) K) - 1/(1 - eps)) - eps/(1 - eps)).
/// May be negative. Throws DomainError outside the open boxes or for K <= 0.
double k2_objective(double k, double K, const K2Params& x);

struct K2LowerBound {
  double value = 0.0;  // max(raw, 0)
  double raw = 0.0;    // best objective found
  K2Params argmax;
};

/// Deterministic maximization of k2_objective: a log-spaced grid on the 4-box
/// plus the coupling curve eps1 = eps2 = sqrt(2 delta / (1 - delta)), then
/// multiplicative coordinate ascent from the best grid point.
K2LowerBound k2_lower_bound(double k, double K, const BoundParams& params = {});

struct GapVerdict {
  bool has_gap = false;  // r > tol
  bool cond_kK = false;  // k > tol and K < 2 - tol
  bool cond_k2 = false;  // k2 > tol
  bool consistent = false;
};

GapVerdict make_verdict(double r, double k, double K, double k2, double gap_tol = kGapTol);

/// Computes r, k (closed family), K and k2 exactly and evaluates the three
/// predicates. Requires a reversible chain within the exact limit.
GapVerdict classify(const MarkovChain& chain, const BoundParams& params = {},
                    const CutOptions& options = {});

/// Measured-versus-bound comparison. `slack` is bound-side minus
/// measured-side, so a check passes when slack >= -margin.
struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  double margin = 0.0;
  bool passed = true;
  bool skipped = false;
  std::string detail;
};

struct BoundReport {
  std::optional<CutReport> k_strict;
  CutReport k_closed;
  CutReport K;
  CutReport k2;
  SpectrumReport spectrum;
  std::optional<Interval> lawler_sokal_strict;
  Interval lawler_sokal_closed;
  Interval enclosure;
  K2LowerBound k2_bound;
  GapVerdict verdict;
  /// False when any cut value came from a heuristic; the bound checks that
  /// need exact values are then skipped.
  bool certified = true;
  std::vector<Check> checks;

  bool all_passed() const noexcept;
};

/// Everything above plus the containment checks with margin 1e-9.
BoundReport verify_report(const MarkovChain& chain, const BoundParams& params = {},
                          const CutOptions& options = {});

/// Builds the report from already computed cut values and spectrum.
BoundReport assemble_report(std::optional<CutReport> k_strict, CutReport k_closed, CutReport K,
                            CutReport k2, SpectrumReport spectrum, const BoundParams& params);

struct InvariantOptions {
  /// Per-subset lemma checks run over all subsets up to this size.
  std::size_t per_set_limit = 12;
  double margin = 1e-9;
};

/// Chain-level and per-subset identities: stationarity, detailed balance of
/// n-step kernels, complement symmetry, 0 <= k(A) <= 2, k_n(A) <= n k(A),
/// k2(A) <= 1/(pi(A) pi(A^c)) - 2 k(A), near-2 sets have mass near 1/2,
/// spectral mapping through p^2, k = 0 iff k_n = 0, plus every check of
/// verify_report.
std::vector<Check> invariant_suite(const MarkovChain& chain, const BoundParams& params = {},
                                   const CutOptions& options = {},
                                   const InvariantOptions& inv = {});

}  // namespace l2gap
