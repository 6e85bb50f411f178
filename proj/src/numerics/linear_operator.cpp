#include "crd/numerics/linear_operator.hpp"

#include <stdexcept>

#include "crd/numerics/linalg.hpp"

namespace crd {

CVector LinearOperator::column(std::size_t j) const {
  if (j >= cols()) throw std::out_of_range("LinearOperator::column: index out of range");
  CVector e(cols()), out(rows());
  e[j] = 1.0;
  apply(e, out);
  return out;
}

double LinearOperator::mean_row_norm_sq() const {
  double s = 0.0;
  for (std::size_t j = 0; j < cols(); ++j) {
    for (const auto& v : column(j)) s += std::norm(v);
  }
  return s / static_cast<double>(rows());
}

DenseOperator::DenseOperator(CMatrix a) : a_(std::move(a)), row_gram_factor_(a_.rows(), a_.rows()) {
  const std::size_t m = a_.rows();
  const std::size_t n = a_.cols();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cplx s{};
      for (std::size_t c = 0; c < n; ++c) s += a_(i, c) * std::conj(a_(j, c));
      row_gram_factor_(i, j) = s;
      row_gram_factor_(j, i) = std::conj(s);
    }
  }
  if (!cholesky_factor(row_gram_factor_)) {
    throw std::invalid_argument("DenseOperator: A A^* is not positive definite (rank-deficient rows)");
  }
}

void DenseOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != cols() || y.size() != rows()) throw std::invalid_argument("DenseOperator::apply: dimension mismatch");
  for (std::size_t r = 0; r < rows(); ++r) {
    cplx s{};
    const auto row = a_.row(r);
    for (std::size_t c = 0; c < cols(); ++c) s += row[c] * x[c];
    y[r] = s;
  }
}

void DenseOperator::adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  if (y.size() != rows() || x.size() != cols()) {
    throw std::invalid_argument("DenseOperator::adjoint: dimension mismatch");
  }
  std::fill(x.begin(), x.end(), cplx{});
  for (std::size_t r = 0; r < rows(); ++r) {
    const auto row = a_.row(r);
    for (std::size_t c = 0; c < cols(); ++c) x[c] += std::conj(row[c]) * y[r];
  }
}

void DenseOperator::solve_row_gram(std::span<const cplx> r, std::span<cplx> u) const {
  cholesky_solve(row_gram_factor_, r, u);
}

CVector DenseOperator::column(std::size_t j) const {
  if (j >= cols()) throw std::out_of_range("DenseOperator::column: index out of range");
  CVector out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = a_(r, j);
  return out;
}

double DenseOperator::mean_row_norm_sq() const {
  double s = 0.0;
  for (const auto& v : a_.data()) s += std::norm(v);
  return s / static_cast<double>(rows());
}

}  // namespace crd
