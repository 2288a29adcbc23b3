#include "l2gap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "l2gap/error.hpp"

namespace l2gap {

SymmetricEigen jacobi_eigen(Matrix a, const EigenOptions& options) {
  if (!a.square()) throw Error(ErrorCode::DomainError, "eigensolver needs a square matrix");
  const std::size_t n = a.rows();
  const simd::Kernels& kernels = options.kernels ? *options.kernels : simd::best_kernels();

  std::optional<Matrix> vt;  // row k holds eigenvector k
  if (options.vectors) vt = Matrix::identity(n);

  double frob = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) frob += a.data()[i] * a.data()[i];
  const double tol = options.off_tol * std::max(1.0, std::sqrt(frob));

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  for (;; ++sweep) {
    if (off_norm() <= tol) break;
    if (sweep == options.max_sweeps)
      throw Error(ErrorCode::NoConvergence,
                  "Jacobi did not converge in " + std::to_string(options.max_sweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        kernels.rotate(a.row(p).data(), a.row(q).data(), c, s, n);
        // Rows p and q are final off the 2x2 block; mirror them into the columns.
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          a(i, p) = a(p, i);
          a(i, q) = a(q, i);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        if (vt) kernels.rotate(vt->row(p).data(), vt->row(q).data(), c, s, n);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = a(order[k], order[k]);
  if (vt) {
    Matrix sorted(n, n);
    for (std::size_t k = 0; k < n; ++k)
      std::copy(vt->row(order[k]).begin(), vt->row(order[k]).end(), sorted.row(k).begin());
    out.vectors = std::move(sorted);
  }
  return out;
}

Matrix symmetrize(const MarkovChain& chain) {
  if (!chain.reversible())
    throw Error(ErrorCode::NotReversible,
                "detailed balance fails (asymmetry " + std::to_string(chain.asymmetry()) + ")");
  const std::size_t n = chain.size();
  const auto pi = chain.pi();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = std::sqrt(pi[i] / pi[j]) * chain.kernel()(i, j);
  return s;
}

SpectrumReport spectrum(const MarkovChain& chain, const EigenOptions& options) {
  const Matrix s = symmetrize(chain);
  const std::size_t n = s.rows();
  Matrix sym(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (s(i, j) + s(j, i));

  SymmetricEigen eig = jacobi_eigen(sym, options);
  SpectrumReport r;
  // The spectrum of a stochastic kernel lies in [-1, 1]; clamp rounding spill.
  r.eigenvalues = eig.values;
  for (double& v : r.eigenvalues) v = std::clamp(v, -1.0, 1.0);
  r.sweeps = eig.sweeps;
  r.gap_at_one = 1.0 - r.eigenvalues[1];
  r.gap_at_minus_one = 1.0 + r.eigenvalues[n - 1];
  r.spectral_gap = std::min(r.gap_at_one, r.gap_at_minus_one);
  if (eig.vectors) {
    const Matrix& v = *eig.vectors;
    const auto pi = chain.pi();
    Matrix f(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto sv = matvec(sym, v.row(k));
      for (std::size_t i = 0; i < n; ++i) {
        r.max_residual = std::max(r.max_residual, std::abs(sv[i] - r.eigenvalues[k] * v(k, i)));
        f(k, i) = v(k, i) / std::sqrt(pi[i]);
      }
    }
    r.eigenfunctions = std::move(f);
  }
  return r;
}

SpectrumReport spectrum_of_square(const MarkovChain& chain, const EigenOptions& options) {
  if (!chain.reversible())
    throw Error(ErrorCode::NotReversible,
                "detailed balance fails (asymmetry " + std::to_string(chain.asymmetry()) + ")");
  return spectrum(n_step_chain(chain, 2), options);
}

double l2_norm(std::span<const double> pi, std::span<const double> g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += pi[i] * g[i] * g[i];
  return std::sqrt(s);
}

TestFunction::TestFunction(std::span<const double> pi, std::vector<double> values, double tol)
    : f_(std::move(values)) {
  if (f_.size() != pi.size())
    throw Error(ErrorCode::DimensionMismatch, "test function length differs from the state count");
  double mean = 0.0;
  for (std::size_t i = 0; i < f_.size(); ++i) mean += pi[i] * f_[i];
  const double norm = l2_norm(pi, f_);
  if (std::abs(mean) > tol || std::abs(norm * norm - 1.0) > tol)
    throw Error(ErrorCode::NotMeanZero, "test function must have mean 0 and unit L2(pi) norm");
}

TestFunction TestFunction::normalized(std::span<const double> pi, std::vector<double> values) {
  if (values.size() != pi.size())
    throw Error(ErrorCode::DimensionMismatch, "test function length differs from the state count");
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += pi[i] * values[i];
  for (double& v : values) v -= mean;
  const double norm = l2_norm(pi, values);
  if (norm <= 1e-300) throw Error(ErrorCode::NotMeanZero, "function is constant");
  for (double& v : values) v /= norm;
  return TestFunction(pi, std::move(values));
}

double decay_rate(const MarkovChain& chain, const TestFunction& f, std::uint64_t n_max) {
  if (n_max < 2) throw Error(ErrorCode::DomainError, "decay_rate needs n_max >= 2");
  if (f.values().size() != chain.size())
    throw Error(ErrorCode::DimensionMismatch, "test function length differs from the state count");
  std::vector<double> g(f.values().begin(), f.values().end());
  for (std::uint64_t step = 0; step < n_max; ++step) g = matvec(chain.kernel().matrix(), g);
  const double norm = l2_norm(chain.pi(), g);
  if (norm == 0.0) return 0.0;
  return std::pow(norm, 1.0 / static_cast<double>(n_max));
}

}  // namespace l2gap
