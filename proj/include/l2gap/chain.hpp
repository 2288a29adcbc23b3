#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "l2gap/matrix.hpp"

namespace l2gap {

struct Tolerances {
  double row_tol = 1e-12;   // |row sum - 1|
  double stat_tol = 1e-10;  // ||pi P - pi||_inf
  double rev_tol = 1e-10;   // max |Q_ij - Q_ji|
};

/// Validated row-stochastic matrix.
class TransitionKernel {
 public:
  /// Throws NotStochastic for non-square input, n < 2, negative entries or
  /// row sums off by more than row_tol.
  TransitionKernel(Matrix p, double row_tol);

  std::size_t size() const noexcept { return p_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return p_(i, j); }
  const Matrix& matrix() const noexcept { return p_; }
  /// Largest |row sum - 1| observed at construction.
  double row_residual() const noexcept { return row_residual_; }

 private:
  Matrix p_;
  double row_residual_ = 0.0;
};

class StationaryDistribution {
 public:
  StationaryDistribution() = default;
  StationaryDistribution(std::vector<double> pi, double residual)
      : pi_(std::move(pi)), residual_(residual) {}

  std::span<const double> values() const noexcept { return pi_; }
  double operator[](std::size_t i) const noexcept { return pi_[i]; }
  std::size_t size() const noexcept { return pi_.size(); }
  double min() const noexcept;
  /// ||pi P - pi||_inf for the kernel it was computed from.
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> pi_;
  double residual_ = 0.0;
};

/// Solves (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
/// Throws SingularSystem when the stationary distribution is not unique and
/// NotIrreducible when the residual exceeds stat_tol.
StationaryDistribution stationary_distribution(const TransitionKernel& kernel,
                                               double stat_tol = Tolerances{}.stat_tol);

/// Immutable chain: kernel, stationary distribution and ergodic flow
/// Q_ij = pi_i p_ij.
class MarkovChain {
 public:
  /// Validates the matrix, checks that the support graph has exactly one
  /// recurrent class covering every state, and solves for pi.
  static MarkovChain build(Matrix p, const Tolerances& tol = {});

  /// Chain over `kernel` with a known stationary vector. Verifies stationarity
  /// within tol.stat_tol but not irreducibility; used for n-step and lazy
  /// chains, whose pi is inherited.
  static MarkovChain with_stationary(TransitionKernel kernel, StationaryDistribution pi,
                                     const Tolerances& tol = {});

  std::size_t size() const noexcept { return kernel_.size(); }
  const TransitionKernel& kernel() const noexcept { return kernel_; }
  const StationaryDistribution& stationary() const noexcept { return pi_; }
  std::span<const double> pi() const noexcept { return pi_.values(); }
  const Matrix& flow() const noexcept { return flow_; }
  bool reversible() const noexcept { return reversible_; }
  /// max_{i,j} |Q_ij - Q_ji|
  double asymmetry() const noexcept { return asymmetry_; }
  const Tolerances& tolerances() const noexcept { return tol_; }

 private:
  MarkovChain(TransitionKernel kernel, StationaryDistribution pi, const Tolerances& tol);

  TransitionKernel kernel_;
  StationaryDistribution pi_;
  Matrix flow_;
  bool reversible_ = false;
  double asymmetry_ = 0.0;
  Tolerances tol_;
};

struct NStepKernel {
  std::uint64_t n_steps = 1;
  Matrix p_n;
};

inline constexpr std::uint64_t kMaxSteps = std::uint64_t{1} << 31;

/// p^n by repeated squaring. Throws StepOverflow for n == 0 or n > 2^31.
NStepKernel n_step_kernel(const MarkovChain& chain, std::uint64_t n);

/// The chain with kernel p^n and the same stationary distribution.
MarkovChain n_step_chain(const MarkovChain& chain, std::uint64_t n);

/// hold * I + (1 - hold) * p. Throws BadParams unless hold is in [0, 1).
MarkovChain lazify(const MarkovChain& chain, double hold);

/// Max over i,j of |pi_i p_ij - pi_j p_ji| for an arbitrary kernel matrix.
double detailed_balance_residual(const Matrix& p, std::span<const double> pi);

/// ||pi P - pi||_inf
double stationarity_residual(const Matrix& p, std::span<const double> pi);

}  // namespace l2gap
