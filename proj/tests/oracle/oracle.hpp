#pragma once

// Reference implementations used only by tests. They share no code with the
// library: subsets are brute-forced from plain loops and linear algebra goes
// through Eigen.

#include <cstdint>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

Rows matmul(const Rows& a, const Rows& b);
Rows power(const Rows& p, unsigned n);

/// Unique solution of pi P = pi, sum pi = 1, via Eigen's pivoted QR.
std::vector<double> stationary(const Rows& p);

/// Eigenvalues of the symmetrized kernel, descending, via Eigen.
std::vector<double> spectrum(const Rows& p, const std::vector<double>& pi);

/// flow(A -> A^c) / (pi(A) pi(A^c)) of the n-step chain, A given by bit mask.
double k_of_mask(const Rows& pn, const std::vector<double>& pi, std::uint64_t mask);

struct Extreme {
  double value = 0.0;
  std::uint64_t mask = 0;  // a minimizer, or a maximizer for sup
  bool found = false;
};

struct Extremes {
  Extreme inf_strict;  // pi(A) < 1/2
  Extreme inf_closed;  // pi(A) <= 1/2
  Extreme sup_all;
};

/// Visits every proper subset independently, recomputing each value from scratch.
Extremes naive_extremes(const Rows& p, const std::vector<double>& pi, unsigned n_steps);

}  // namespace oracle
