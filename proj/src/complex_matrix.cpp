#include "matprod/complex_matrix.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

namespace matprod {

namespace {
using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("ComplexMatrix: expected " + std::to_string(rows * cols) +
                                " entries, got " + std::to_string(data_.size()));
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

double ComplexMatrix::frobenius_norm_squared() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return s;
}

double ComplexMatrix::frobenius_norm() const { return std::sqrt(frobenius_norm_squared()); }

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const {
  for (const auto& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

ComplexMatrix ComplexMatrix::shifted(cplx z) const {
  if (!square()) throw std::invalid_argument("shifted: matrix is not square");
  ComplexMatrix out = *this;
  for (std::size_t i = 0; i < rows_; ++i) out(i, i) -= z;
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("multiply: inner dimensions differ (" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + ")");
  }
  ComplexMatrix out(a.rows(), b.cols());
  Eigen::Map<const RowMajor> ma(a.entries().data(), a.rows(), a.cols());
  Eigen::Map<const RowMajor> mb(b.entries().data(), b.rows(), b.cols());
  Eigen::Map<RowMajor> mo(out.entries().data(), out.rows(), out.cols());
  mo.noalias() = ma * mb;
  return out;
}

}  // namespace matprod
