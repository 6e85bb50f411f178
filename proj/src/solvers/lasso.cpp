#include <algorithm>
#include <cmath>

#include "crd/kernels/kernels.hpp"
#include "crd/solvers/solvers.hpp"

namespace crd {

namespace {

constexpr double kAlphaMin = 1e-30;
constexpr double kAlphaMax = 1e30;
constexpr int kMaxBacktracks = 200;

}  // namespace

SolverResult lasso(const LinearOperator& a, std::span<const cplx> y, double lambda, const SolverOptions& opts) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (y.size() != m) throw std::invalid_argument("lasso: y length differs from the operator rows");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lasso: lambda must be >= 0");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("lasso: tol must be positive");

  CVector x(n), x_new(n), grad(n), step(n), s(n);
  CVector r(m), r_new(m), ds(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = -y[i];  // A x - y at x = 0
  a.adjoint(r, grad);
  const double scale = std::max(1.0, kernels::max_abs(grad));
  double f = 0.5 * kernels::norm2_sq(r);
  double alpha = a.mean_row_norm_sq();

  SolverResult result;
  result.objective = f;
  auto check = [](double v) {
    if (!std::isfinite(v)) throw SolverDivergence("lasso: non-finite objective");
  };
  check(f);

  for (int it = 1; it <= opts.max_iter; ++it) {
    double f_new = f;
    double used_alpha = alpha;
    int tries = 0;
    for (;; ++tries) {
      used_alpha = alpha;
      kernels::axpby(1.0, x, -1.0 / alpha, grad, step);
      kernels::soft_threshold(step, lambda / alpha, x_new);
      a.apply(x_new, r_new);
      for (std::size_t i = 0; i < m; ++i) r_new[i] -= y[i];
      f_new = 0.5 * kernels::norm2_sq(r_new) + lambda * norm1(x_new);
      check(f_new);
      if (f_new <= f || tries >= kMaxBacktracks) break;
      alpha = std::min(alpha * 2.0, kAlphaMax);
    }
    if (f_new > f) {
      // No decrease is possible at machine precision: x is stationary.
      result.iterations = it;
      result.converged = true;
      break;
    }

    kernels::axpby(1.0, x_new, -1.0, x, s);
    const double ss = kernels::norm2_sq(s);
    x.swap(x_new);
    r.swap(r_new);
    f = f_new;
    a.adjoint(r, grad);
    if (opts.record_history) result.history.push_back({it, std::sqrt(kernels::norm2_sq(r)), f});
    result.iterations = it;

    if (used_alpha * std::sqrt(ss) <= opts.tol * scale) {
      result.converged = true;
      break;
    }
    if (ss > 0.0) {
      a.apply(s, ds);
      alpha = std::clamp(kernels::norm2_sq(ds) / ss, kAlphaMin, kAlphaMax);
    }
  }
  result.estimate = std::move(x);
  result.residual = std::sqrt(kernels::norm2_sq(r));
  result.objective = f;
  return result;
}

}  // namespace crd
