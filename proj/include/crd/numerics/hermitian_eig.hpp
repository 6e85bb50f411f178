#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "crd/numerics/types.hpp"

namespace crd {

struct HermitianEigen {
  RVector values;   ///< real, sorted descending
  CMatrix vectors;  ///< column i pairs with values[i]
};

/// Thrown when the Jacobi sweeps hit their cap; carries the off-diagonal residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Hermitian symmetry check: |A_ij - conj(A_ji)| <= tol * max(1, ||A||_max) and real diagonal.
bool is_hermitian(const CMatrix& a, double tol = 1e-12);

/// Cyclic complex Jacobi eigensolver for small Hermitian matrices (n <= 512).
HermitianEigen hermitian_eig(const CMatrix& a, double hermitian_tol = 1e-12, int max_sweeps = 60);

}  // namespace crd
