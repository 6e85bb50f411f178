#pragma once

#include <cstddef>
#include <stdexcept>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crd/numerics/linear_operator.hpp"
#include "crd/numerics/types.hpp"

namespace crd {

/// Per-iteration trace entry, recorded when SolverOptions::record_history is set.
struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;
  double objective = 0.0;
};

struct SolverResult {
  CVector estimate;
  int iterations = 0;
  double residual = 0.0;   ///< ||A x - y||_2
  double objective = 0.0;  ///< ||x||_1 (basis pursuit) or 0.5 ||A x - y||^2 + lambda ||x||_1 (lasso)
  bool converged = false;
  /// Basis pursuit: optimality proven by a dual certificate on the polished support.
  bool certified = false;
  std::vector<IterationRecord> history;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  bool record_history = false;
};

/// Thrown when an iterate becomes NaN or infinite.
class SolverDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// min ||x||_1 subject to A x = y (complex l1 = sum of moduli).
///
/// Dual alternating-direction scheme: z = proj_{|.|<=1}(A^* u + x / beta),
/// (A A^*) u = A z - (A x - y) / beta, x -= gamma beta (z - A^* u). Every few iterations the
/// candidate support that has stayed unchanged across two checks is polished by least
/// squares. The polished point is returned as soon as it fits y and either carries a dual
/// certificate or closes the duality gap to tol. A certificate is a u with
/// (A^* u)_T = sign x_T and |A^* u| <= 1 elsewhere; both the least-norm such u and the
/// iterate's dual corrected onto that affine set are tried. Otherwise the scheme stops when
/// x and z are stationary to tol; reaching max_iter returns converged = false.
SolverResult basis_pursuit(const LinearOperator& a, std::span<const cplx> y, const SolverOptions& opts = {});

/// min 0.5 ||A x - y||^2 + lambda ||x||_1 by monotone SpaRSA: Barzilai-Borwein step, complex
/// soft thresholding, step doubling until the objective decreases. Stops when the scaled
/// fixed-point residual alpha ||x+ - x|| drops below tol * max(1, ||A^* y||_inf).
SolverResult lasso(const LinearOperator& a, std::span<const cplx> y, double lambda, const SolverOptions& opts = {});

/// ||alpha - estimate||_inf <= 1e-6
bool recovery_success(std::span<const cplx> alpha, std::span<const cplx> estimate, double threshold = 1e-6);

/// Floor for mse_db when the error is exactly zero.
inline constexpr double kMseFloorDb = -160.0;
/// 10 log10(||alpha - estimate||^2 / W), floored at kMseFloorDb.
double mse_db(std::span<const cplx> alpha, std::span<const cplx> estimate);

/// lambda = 1.9 sqrt(2 p ln W)
double lasso_lambda(double noise_power, std::size_t W);

enum class OracleStatus { unique, not_unique, infeasible };

struct OracleResult {
  OracleStatus status = OracleStatus::infeasible;
  std::size_t sparsity = 0;
  std::vector<std::size_t> support;  ///< first exact-fit support found at the minimal sparsity
  CVector estimate;                  ///< dense solution on that support
  std::size_t fitting_supports = 0;  ///< exact-fit supports at the minimal sparsity
};

/// Enumerates every support of size 0..s_max, solves least squares on it, and reports the
/// sparsest exact fits (residual <= fit_tol * max(1, ||y||)). Requires cols <= 20, s_max <= 3.
OracleResult exhaustive_oracle(const CMatrix& phi, std::span<const cplx> y, std::size_t s_max, double fit_tol = 1e-9);

std::string oracle_status_name(OracleStatus status);

/// "iteration,residual,objective" rows.
std::string history_csv(const SolverResult& result);

}  // namespace crd
