#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "l2gap/chain.hpp"
#include "l2gap/matrix.hpp"
#include "l2gap/simd/kernels.hpp"

namespace l2gap {

struct EigenOptions {
  int max_sweeps = 100;
  /// Stop once the off-diagonal Frobenius norm is below off_tol * max(1, ||A||_F).
  double off_tol = 1e-13;
  bool vectors = false;
  const simd::Kernels* kernels = nullptr;
};

struct SymmetricEigen {
  std::vector<double> values;  // descending
  /// values[k] pairs with row k of `vectors` (unit norm), when requested.
  std::optional<Matrix> vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi. Throws NoConvergence after max_sweeps, DomainError for a
/// non-square input.
SymmetricEigen jacobi_eigen(Matrix a, const EigenOptions& options = {});

/// S_ij = sqrt(pi_i / pi_j) p_ij, symmetric for reversible chains.
/// Throws NotReversible.
Matrix symmetrize(const MarkovChain& chain);

struct SpectrumReport {
  std::vector<double> eigenvalues;  // descending, eigenvalues[0] ~ 1
  double gap_at_one = 0.0;          // 1 - lambda_2
  double gap_at_minus_one = 0.0;    // 1 + lambda_n
  double spectral_gap = 0.0;        // min of the two
  /// Right eigenvectors of P in L^2(pi), row k pairing with eigenvalues[k],
  /// each with sum_i pi_i f_i^2 = 1. Present when requested.
  std::optional<Matrix> eigenfunctions;
  /// max_k ||S v_k - lambda_k v_k||_inf when vectors were requested.
  double max_residual = 0.0;
  int sweeps = 0;
};

/// Spectrum of P through the symmetrized kernel. Throws NotReversible.
SpectrumReport spectrum(const MarkovChain& chain, const EigenOptions& options = {});

/// Spectrum of the two-step kernel p^2 under the same pi.
SpectrumReport spectrum_of_square(const MarkovChain& chain, const EigenOptions& options = {});

inline constexpr double kGapTol = 1e-9;

inline bool has_spectral_gap(const SpectrumReport& report, double gap_tol = kGapTol) noexcept {
  return report.spectral_gap > gap_tol;
}

/// A function in L^2_{0,1}(pi): mean zero and unit norm under pi.
class TestFunction {
 public:
  /// Throws NotMeanZero when |sum pi_i f_i| or |sum pi_i f_i^2 - 1| exceeds tol.
  TestFunction(std::span<const double> pi, std::vector<double> values, double tol = 1e-10);

  /// Centers and rescales arbitrary values. Throws NotMeanZero when the
  /// centered function vanishes.
  static TestFunction normalized(std::span<const double> pi, std::vector<double> values);

  std::span<const double> values() const noexcept { return f_; }

 private:
  std::vector<double> f_;
};

/// sum_i pi_i g_i^2, square-rooted.
double l2_norm(std::span<const double> pi, std::span<const double> g);

/// ||P^n f||_2^(1/n) at n = n_max. Throws DomainError for n_max < 2.
double decay_rate(const MarkovChain& chain, const TestFunction& f, std::uint64_t n_max);

}  // namespace l2gap
