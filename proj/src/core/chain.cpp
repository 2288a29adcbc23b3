#include "l2gap/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "l2gap/error.hpp"

namespace l2gap {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Strongly connected components of the support graph (Kosaraju, iterative).
std::vector<std::size_t> components(const Matrix& p, std::size_t& count) {
  const std::size_t n = p.rows();
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    seen[start] = 1;
    stack.emplace_back(start, 0);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      while (next < n && (p(v, next) <= 0.0 || seen[next])) ++next;
      if (next == n) {
        order.push_back(v);
        stack.pop_back();
      } else {
        seen[next] = 1;
        stack.emplace_back(next, 0);
      }
    }
  }
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(n, kUnset);
  count = 0;
  std::vector<std::size_t> todo;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != kUnset) continue;
    todo.push_back(*it);
    comp[*it] = count;
    while (!todo.empty()) {
      const std::size_t v = todo.back();
      todo.pop_back();
      for (std::size_t u = 0; u < n; ++u) {
        if (p(u, v) > 0.0 && comp[u] == kUnset) {
          comp[u] = count;
          todo.push_back(u);
        }
      }
    }
    ++count;
  }
  return comp;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
bool solve_dense(Matrix a, std::vector<double>& b) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(a.data()[i]));
  const double tiny = 1e-13 * std::max(scale, 1.0);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= tiny) return false;
    if (piv != col) {
      std::swap_ranges(a.row(col).begin(), a.row(col).end(), a.row(piv).begin());
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * b[c];
    b[i] = s / a(i, i);
  }
  return true;
}

Matrix stationary_system(const Matrix& p) {
  const std::size_t n = p.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  return a;
}

}  // namespace

TransitionKernel::TransitionKernel(Matrix p, double row_tol) : p_(std::move(p)) {
  if (!p_.square()) throw Error(ErrorCode::NotStochastic, "transition matrix must be square");
  if (p_.rows() < 2) throw Error(ErrorCode::NotStochastic, "need at least 2 states");
  for (std::size_t i = 0; i < p_.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < p_.cols(); ++j) {
      const double v = p_(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorCode::NotStochastic, "entry (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ") is negative or not finite");
      sum += v;
    }
    const double off = std::abs(sum - 1.0);
    if (off > row_tol)
      throw Error(ErrorCode::NotStochastic,
                  "row " + std::to_string(i) + " sums to 1" + (sum > 1 ? "+" : "-") + fmt(off));
    row_residual_ = std::max(row_residual_, off);
  }
}

double StationaryDistribution::min() const noexcept {
  return pi_.empty() ? 0.0 : *std::min_element(pi_.begin(), pi_.end());
}

double stationarity_residual(const Matrix& p, std::span<const double> pi) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i) s += pi[i] * p(i, j);
    worst = std::max(worst, std::abs(s - pi[j]));
  }
  return worst;
}

double detailed_balance_residual(const Matrix& p, std::span<const double> pi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = i + 1; j < p.cols(); ++j)
      worst = std::max(worst, std::abs(pi[i] * p(i, j) - pi[j] * p(j, i)));
  return worst;
}

StationaryDistribution stationary_distribution(const TransitionKernel& kernel, double stat_tol) {
  const Matrix& p = kernel.matrix();
  const std::size_t n = p.rows();
  const Matrix a = stationary_system(p);
  std::vector<double> pi(n, 0.0);
  pi[n - 1] = 1.0;
  if (!solve_dense(a, pi))
    throw Error(ErrorCode::SingularSystem, "stationary distribution is not unique");

  // One step of iterative refinement.
  std::vector<double> r(n, 0.0);
  r[n - 1] = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i] -= a(i, j) * pi[j];
  if (solve_dense(a, r))
    for (std::size_t i = 0; i < n; ++i) pi[i] += r[i];

  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= total;
  const double residual = stationarity_residual(p, pi);
  if (!(residual <= stat_tol))
    throw Error(ErrorCode::NotIrreducible,
                "stationary residual " + fmt(residual) + " exceeds " + fmt(stat_tol));
  return StationaryDistribution(std::move(pi), residual);
}

MarkovChain::MarkovChain(TransitionKernel kernel, StationaryDistribution pi, const Tolerances& tol)
    : kernel_(std::move(kernel)), pi_(std::move(pi)), tol_(tol) {
  const std::size_t n = kernel_.size();
  flow_ = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) flow_(i, j) = pi_[i] * kernel_(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      asymmetry_ = std::max(asymmetry_, std::abs(flow_(i, j) - flow_(j, i)));
  reversible_ = asymmetry_ <= tol_.rev_tol;
}

MarkovChain MarkovChain::build(Matrix p, const Tolerances& tol) {
  TransitionKernel kernel(std::move(p), tol.row_tol);
  std::size_t count = 0;
  const auto comp = components(kernel.matrix(), count);
  // A class is recurrent when no edge leaves it.
  std::vector<char> closed(count, 1);
  const std::size_t n = kernel.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (kernel(i, j) > 0.0 && comp[i] != comp[j]) closed[comp[i]] = 0;
  const auto recurrent = static_cast<std::size_t>(std::count(closed.begin(), closed.end(), 1));
  if (recurrent > 1)
    throw Error(ErrorCode::NotIrreducible, std::to_string(recurrent) + " recurrent classes");
  if (count > 1)
    throw Error(ErrorCode::ZeroMassState, "transient states carry zero stationary mass");

  StationaryDistribution pi = stationary_distribution(kernel, tol.stat_tol);
  if (pi.min() <= 0.0) throw Error(ErrorCode::ZeroMassState, "stationary mass underflows to zero");
  return MarkovChain(std::move(kernel), std::move(pi), tol);
}

MarkovChain MarkovChain::with_stationary(TransitionKernel kernel, StationaryDistribution pi,
                                         const Tolerances& tol) {
  if (pi.size() != kernel.size())
    throw Error(ErrorCode::DimensionMismatch, "stationary vector has " + std::to_string(pi.size()) +
                                                  " entries for " + std::to_string(kernel.size()) +
                                                  " states");
  if (pi.min() <= 0.0) throw Error(ErrorCode::ZeroMassState, "stationary vector has a zero entry");
  const double total = std::accumulate(pi.values().begin(), pi.values().end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorCode::ValidationError, "stationary vector sums to " + fmt(total));
  const double residual = stationarity_residual(kernel.matrix(), pi.values());
  if (!(residual <= tol.stat_tol))
    throw Error(ErrorCode::ValidationError,
                "vector is not stationary (residual " + fmt(residual) + ")");
  std::vector<double> values(pi.values().begin(), pi.values().end());
  return MarkovChain(std::move(kernel), StationaryDistribution(std::move(values), residual), tol);
}

NStepKernel n_step_kernel(const MarkovChain& chain, std::uint64_t n) {
  if (n == 0 || n > kMaxSteps)
    throw Error(ErrorCode::StepOverflow, "step count must be in [1, 2^31], got " + std::to_string(n));
  Matrix base = chain.kernel().matrix();
  if (n == 1) return {1, std::move(base)};
  Matrix result;
  bool have = false;
  for (std::uint64_t e = n;;) {
    if (e & 1u) {
      result = have ? multiply(result, base) : base;
      have = true;
    }
    e >>= 1;
    if (e == 0) break;
    base = multiply(base, base);
  }
  return {n, std::move(result)};
}

MarkovChain n_step_chain(const MarkovChain& chain, std::uint64_t n) {
  NStepKernel pn = n_step_kernel(chain, n);
  Tolerances tol = chain.tolerances();
  const auto scale = static_cast<double>(n);
  tol.row_tol *= scale;
  tol.stat_tol *= scale;
  tol.rev_tol *= scale;
  TransitionKernel kernel(std::move(pn.p_n), tol.row_tol);
  return MarkovChain::with_stationary(std::move(kernel), chain.stationary(), tol);
}

MarkovChain lazify(const MarkovChain& chain, double hold) {
  if (!(hold >= 0.0 && hold < 1.0))
    throw Error(ErrorCode::BadParams, "hold must lie in [0, 1), got " + fmt(hold));
  const std::size_t n = chain.size();
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p(i, j) = (1.0 - hold) * chain.kernel()(i, j) + (i == j ? hold : 0.0);
  TransitionKernel kernel(std::move(p), chain.tolerances().row_tol);
  return MarkovChain::with_stationary(std::move(kernel), chain.stationary(), chain.tolerances());
}

}  // namespace l2gap
