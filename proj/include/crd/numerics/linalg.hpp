#pragma once

#include <functional>
#include <optional>
#include <span>

#include "crd/numerics/rng.hpp"
#include "crd/numerics/types.hpp"

namespace crd {

/// In-place Cholesky factor L (lower) of a Hermitian positive definite matrix.
/// Returns false when a pivot is not positive.
bool cholesky_factor(CMatrix& a);

/// Solves L L^* x = b given the factor produced by cholesky_factor.
void cholesky_solve(const CMatrix& factor, std::span<const cplx> b, std::span<cplx> x);

/// Least squares min ||A x - b|| by modified Gram-Schmidt QR. Returns nullopt when A is
/// numerically rank deficient (a column loses more than 1 - rank_tol of its norm).
std::optional<CVector> least_squares_qr(const CMatrix& a, std::span<const cplx> b, double rank_tol = 1e-10);

/// A^* A for a dense matrix (exactly Hermitian by construction).
CMatrix gram(const CMatrix& a);

CVector matvec(const CMatrix& a, std::span<const cplx> x);
CVector adjoint_matvec(const CMatrix& a, std::span<const cplx> y);

struct PowerIterationResult {
  double norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

using HermitianApply = std::function<void(std::span<const cplx>, std::span<cplx>)>;

/// Spectral norm of a Hermitian operator by power iteration on A^2 (so that eigenvalues
/// of opposite sign and equal modulus cannot stall it).
PowerIterationResult hermitian_spectral_norm(std::size_t n, const HermitianApply& apply, RngStream rng,
                                             double tol = 1e-8, int max_iter = 10000);

PowerIterationResult hermitian_spectral_norm(const CMatrix& a, RngStream rng, double tol = 1e-8,
                                             int max_iter = 10000);

}  // namespace crd
