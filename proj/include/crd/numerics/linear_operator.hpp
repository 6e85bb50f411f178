#pragma once

#include <cstddef>
#include <span>

#include "crd/numerics/types.hpp"

namespace crd {

/// Matrix-free view of a complex rows x cols matrix A with full row rank.
///
/// Implementations may keep scratch buffers, so a single instance must not be used from
/// several threads at once.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  [[nodiscard]] virtual std::size_t rows() const = 0;
  [[nodiscard]] virtual std::size_t cols() const = 0;
  /// y = A x
  virtual void apply(std::span<const cplx> x, std::span<cplx> y) const = 0;
  /// x = A^* y
  virtual void adjoint(std::span<const cplx> y, std::span<cplx> x) const = 0;
  /// Solves (A A^*) u = r.
  virtual void solve_row_gram(std::span<const cplx> r, std::span<cplx> u) const = 0;
  /// Column j of A.
  [[nodiscard]] virtual CVector column(std::size_t j) const;
  /// ||A||_F^2 / rows, the mean squared row norm.
  [[nodiscard]] virtual double mean_row_norm_sq() const;
};

/// Operator backed by an explicit matrix; A A^* is Cholesky-factored at construction and
/// must be positive definite.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(CMatrix a);

  [[nodiscard]] std::size_t rows() const override { return a_.rows(); }
  [[nodiscard]] std::size_t cols() const override { return a_.cols(); }
  void apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  void solve_row_gram(std::span<const cplx> r, std::span<cplx> u) const override;
  [[nodiscard]] CVector column(std::size_t j) const override;
  [[nodiscard]] double mean_row_norm_sq() const override;
  [[nodiscard]] const CMatrix& matrix() const noexcept { return a_; }

 private:
  CMatrix a_;
  CMatrix row_gram_factor_;
};

}  // namespace crd
