#include <algorithm>
#include <cmath>
#include <numeric>

#include "crd/kernels/kernels.hpp"
#include "crd/numerics/linalg.hpp"
#include "crd/solvers/solvers.hpp"

namespace crd {

namespace {

constexpr double kGamma = 1.618;
constexpr int kPolishEvery = 10;
// Entries below this fraction of the largest modulus are left out of the candidate support.
constexpr double kSupportCut = 1e-3;
constexpr double kCertificateSlack = 1e-9;

void check_finite(std::span<const cplx> v) {
  for (const auto& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw SolverDivergence("basis_pursuit: non-finite iterate");
  }
}

struct Polished {
  CVector x;
  double residual = 0.0;
  bool certified = false;
};

// Least squares on support t, followed by the dual certificate test.
std::optional<Polished> polish(const LinearOperator& a, std::span<const cplx> y, const std::vector<std::size_t>& t,
                               double fit_tol, std::span<const cplx> u_hint) {
  const std::size_t m = a.rows();
  const std::size_t k = t.size();
  std::vector<CVector> cols;
  cols.reserve(k);
  for (std::size_t c : t) cols.push_back(a.column(c));
  CMatrix g(k, k);
  CVector rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const cplx v = kernels::dot(cols[i], cols[j]);
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
    rhs[i] = kernels::dot(cols[i], y);
  }
  if (!cholesky_factor(g)) return std::nullopt;
  CVector coef(k);
  cholesky_solve(g, rhs, coef);

  CVector fit(m);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t r = 0; r < m; ++r) fit[r] += cols[i][r] * coef[i];
  }
  double res = 0.0;
  for (std::size_t r = 0; r < m; ++r) res += std::norm(fit[r] - y[r]);
  res = std::sqrt(res);
  if (res > fit_tol) return std::nullopt;

  Polished p;
  p.x.assign(a.cols(), cplx{});
  for (std::size_t i = 0; i < k; ++i) p.x[t[i]] = coef[i];
  p.residual = res;

  // Certificates u with (A^* u)_T = sign(x_T) exactly: the least-norm one A_T G^{-1} sign(x_T),
  // and the iterate's dual u_hint corrected onto that affine set. Either one with
  // |A^* u| <= 1 off T proves optimality.
  CVector sgn(k), v(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (coef[i] == cplx{}) return p;
    sgn[i] = coef[i] / std::abs(coef[i]);
  }
  std::vector<bool> on(a.cols(), false);
  for (std::size_t c : t) on[c] = true;
  CVector u(m), atu(a.cols());
  auto certifies = [&](std::span<const cplx> base) {
    for (std::size_t i = 0; i < k; ++i) v[i] = sgn[i] - (base.empty() ? cplx{} : kernels::dot(cols[i], base));
    cholesky_solve(g, v, v);
    for (std::size_t r = 0; r < m; ++r) u[r] = base.empty() ? cplx{} : base[r];
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t r = 0; r < m; ++r) u[r] += cols[i][r] * v[i];
    }
    a.adjoint(u, atu);
    double off = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (!on[c]) off = std::max(off, std::norm(atu[c]));
    }
    return std::sqrt(off) <= 1.0 + kCertificateSlack;
  };
  p.certified = certifies({}) || certifies(u_hint);
  return p;
}

std::vector<std::size_t> candidate_support(std::span<const cplx> x, std::size_t cap) {
  std::vector<double> mag_sq(x.size());
  double top = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mag_sq[i] = std::norm(x[i]);
    top = std::max(top, mag_sq[i]);
  }
  std::vector<std::size_t> idx;
  if (top == 0.0) return idx;
  const double cut = kSupportCut * kSupportCut * top;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mag_sq[i] > cut) idx.push_back(i);
  }
  if (idx.size() > cap) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) { return mag_sq[p] > mag_sq[q]; });
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

}  // namespace

SolverResult basis_pursuit(const LinearOperator& a, std::span<const cplx> y, const SolverOptions& opts) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (y.size() != m) throw std::invalid_argument("basis_pursuit: y length differs from the operator rows");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("basis_pursuit: tol must be positive");
  check_finite(y);

  SolverResult result;
  result.estimate.assign(n, cplx{});
  const double ynorm = kernels::norm2_sq(y) == 0.0 ? 0.0 : std::sqrt(kernels::norm2_sq(y));
  if (ynorm == 0.0) {
    result.converged = true;
    result.certified = true;
    return result;
  }
  const double fit_tol = opts.tol * std::max(1.0, ynorm);

  // The row scale s (A = s Q with Q of unit mean row norm) sets the penalty so that the
  // iteration is invariant to rescaling A or y.
  const double row_scale = std::sqrt(a.mean_row_norm_sq());
  double mean_abs = 0.0;
  for (const auto& v : y) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(m);
  const double beta = mean_abs / row_scale;

  CVector x(n), z(n), z_old(n), aty(n), tmp_n(n), u(m), tmp_m(m), x_old(n);
  // Start from the least-norm solution A^* (A A^*)^{-1} y.
  a.solve_row_gram(y, tmp_m);
  a.adjoint(tmp_m, x);

  // A support is polished once, after it survives two consecutive checks unchanged.
  std::vector<std::size_t> last_candidate, last_polished;
  auto finish = [&](CVector estimate, bool converged, bool certified, int iterations) {
    a.apply(estimate, tmp_m);
    double res = 0.0;
    for (std::size_t r = 0; r < m; ++r) res += std::norm(tmp_m[r] - y[r]);
    result.estimate = std::move(estimate);
    result.residual = std::sqrt(res);
    result.objective = norm1(result.estimate);
    result.converged = converged;
    result.certified = certified;
    result.iterations = iterations;
    return result;
  };

  for (int it = 1; it <= opts.max_iter; ++it) {
    // z-step: projection onto the unit l_inf ball.
    z_old = z;
    kernels::axpby(1.0, aty, 1.0 / beta, x, tmp_n);
    kernels::project_linf_ball(tmp_n, 1.0, z);
    // u-step: (A A^*) u = A (z - x / beta) + y / beta.
    kernels::axpby(1.0, z, -1.0 / beta, x, tmp_n);
    a.apply(tmp_n, tmp_m);
    for (std::size_t r = 0; r < m; ++r) tmp_m[r] += y[r] / beta;
    a.solve_row_gram(tmp_m, u);
    a.adjoint(u, aty);
    // Multiplier step.
    x_old = x;
    kernels::axpby(1.0, z, -1.0, aty, tmp_n);
    kernels::axpby(1.0, x, -kGamma * beta, tmp_n, x);
    check_finite(x);

    if (opts.record_history) {
      a.apply(x, tmp_m);
      double res = 0.0;
      for (std::size_t r = 0; r < m; ++r) res += std::norm(tmp_m[r] - y[r]);
      result.history.push_back({it, std::sqrt(res), norm1(x)});
    }

    if (it % kPolishEvery == 0) {
      auto support = candidate_support(x, m);
      const bool stable = support == last_candidate;
      last_candidate = support;
      // A support at the cap fits any y, so polishing it proves nothing cheaply.
      if (stable && !support.empty() && support.size() < m && support != last_polished) {
        last_polished = support;
        if (auto p = polish(a, y, support, fit_tol, u)) {
          if (p->certified) return finish(std::move(p->x), true, true, it);
          // Duality gap against the scaled dual-feasible point u / max(1, ||A^* u||_inf).
          const double scale = std::max(1.0, kernels::max_abs(aty));
          const double dual = kernels::dot(y, u).real() / scale;
          const double primal = norm1(p->x);
          if (primal - dual <= opts.tol * std::max(primal, 1e-300)) return finish(std::move(p->x), true, false, it);
        }
      }
    }

    // A fixed point needs both the multiplier and the dual slack z to be stationary.
    kernels::axpby(1.0, x, -1.0, x_old, tmp_n);
    const double change = std::sqrt(kernels::norm2_sq(tmp_n));
    const double size = std::sqrt(kernels::norm2_sq(x));
    kernels::axpby(1.0, z, -1.0, z_old, tmp_n);
    const double z_change = std::sqrt(kernels::norm2_sq(tmp_n));
    if (it > 1 && change <= opts.tol * std::max(size, 1e-300) && z_change <= opts.tol * std::sqrt(static_cast<double>(n))) {
      // Project onto the affine feasible set: x -= A^* (A A^*)^{-1} (A x - y).
      a.apply(x, tmp_m);
      for (std::size_t r = 0; r < m; ++r) tmp_m[r] -= y[r];
      a.solve_row_gram(tmp_m, u);
      a.adjoint(u, tmp_n);
      kernels::axpby(1.0, x, -1.0, tmp_n, x);
      auto out = finish(x, true, false, it);
      out.converged = out.residual <= fit_tol;
      return out;
    }
  }
  auto out = finish(x, false, false, opts.max_iter);
  return out;
}

}  // namespace crd
