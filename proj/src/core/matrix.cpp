#include "l2gap/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l2gap/error.hpp"
#include "l2gap/simd/kernels.hpp"

namespace l2gap {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw Error(ErrorCode::DimensionMismatch,
                  "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                      " entries, expected " + std::to_string(cols));
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) { return multiply(a, b, simd::best_kernels()); }

Matrix multiply(const Matrix& a, const Matrix& b, const simd::Kernels& kernels) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product shapes");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) kernels.axpy(aik, b.row(k).data(), out, b.cols());
    }
  }
  return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector shapes");
  const simd::Kernels& kernels = simd::best_kernels();
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = kernels.dot(a.row(i).data(), x.data(), x.size());
  return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "matrix comparison shapes");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

}  // namespace l2gap
