#include "crd/numerics/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace crd {

bool cholesky_factor(CMatrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(a(j, k));
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * std::conj(a(j, k));
      a(i, j) = s / ljj;
    }
    for (std::size_t i = 0; i < j; ++i) a(i, j) = 0.0;
  }
  return true;
}

void cholesky_solve(const CMatrix& l, std::span<const cplx> b, std::span<cplx> x) {
  const std::size_t n = l.rows();
  if (b.size() != n || x.size() != n) throw std::invalid_argument("cholesky_solve: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i).real();
  }
  for (std::size_t ii = n; ii-- > 0;) {
    cplx s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x[k];
    x[ii] = s / l(ii, ii).real();
  }
}

std::optional<CVector> least_squares_qr(const CMatrix& a, std::span<const cplx> b, double rank_tol) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw std::invalid_argument("least_squares_qr: dimension mismatch");
  if (n == 0) return CVector{};
  if (n > m) return std::nullopt;

  // Column-major copy of Q, upper triangular R.
  std::vector<CVector> q(n, CVector(m));
  CMatrix r(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) q[j][i] = a(i, j);
    const double original = norm2(q[j]);
    for (std::size_t k = 0; k < j; ++k) {
      const cplx rkj = inner(q[k], q[j]);
      r(k, j) += rkj;
      for (std::size_t i = 0; i < m; ++i) q[j][i] -= rkj * q[k][i];
    }
    // Second pass restores orthogonality lost to cancellation.
    for (std::size_t k = 0; k < j; ++k) {
      const cplx rkj = inner(q[k], q[j]);
      r(k, j) += rkj;
      for (std::size_t i = 0; i < m; ++i) q[j][i] -= rkj * q[k][i];
    }
    const double nrm = norm2(q[j]);
    if (original == 0.0 || nrm <= rank_tol * original) return std::nullopt;
    r(j, j) = nrm;
    for (auto& v : q[j]) v /= nrm;
  }
  CVector qtb(n);
  for (std::size_t j = 0; j < n; ++j) qtb[j] = inner(q[j], b);
  CVector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    cplx s = qtb[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= r(ii, k) * x[k];
    x[ii] = s / r(ii, ii).real();
  }
  return x;
}

CMatrix gram(const CMatrix& a) {
  const std::size_t n = a.cols();
  CMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      cplx s{};
      for (std::size_t r = 0; r < a.rows(); ++r) s += std::conj(a(r, i)) * a(r, j);
      g(i, j) = s;
      g(j, i) = std::conj(s);
    }
    g(i, i) = g(i, i).real();
  }
  return g;
}

CVector matvec(const CMatrix& a, std::span<const cplx> x) {
  if (x.size() != a.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  CVector y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    cplx s{};
    const auto row = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

CVector adjoint_matvec(const CMatrix& a, std::span<const cplx> y) {
  if (y.size() != a.rows()) throw std::invalid_argument("adjoint_matvec: dimension mismatch");
  CVector x(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) x[c] += std::conj(row[c]) * y[r];
  }
  return x;
}

PowerIterationResult hermitian_spectral_norm(std::size_t n, const HermitianApply& apply, RngStream rng, double tol,
                                             int max_iter) {
  CVector x(n), ax(n), a2x(n);
  for (auto& v : x) v = {rng.normal(), rng.normal()};
  double nx = norm2(x);
  for (auto& v : x) v /= nx;

  PowerIterationResult res;
  double previous = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    apply(x, ax);
    apply(ax, a2x);
    // Rayleigh quotient of A^2 is ||A x||^2 for unit x.
    const double estimate = norm2(ax);
    res.norm = estimate;
    res.iterations = it;
    const double n2 = norm2(a2x);
    if (n2 == 0.0) {
      res.norm = 0.0;
      res.converged = true;
      return res;
    }
    if (previous >= 0.0 && std::abs(estimate - previous) <= tol * std::max(estimate, 1e-300)) {
      res.converged = true;
      return res;
    }
    previous = estimate;
    for (std::size_t i = 0; i < n; ++i) x[i] = a2x[i] / n2;
  }
  return res;
}

PowerIterationResult hermitian_spectral_norm(const CMatrix& a, RngStream rng, double tol, int max_iter) {
  if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_spectral_norm: matrix must be square");
  return hermitian_spectral_norm(
      a.rows(),
      [&a](std::span<const cplx> in, std::span<cplx> out) {
        for (std::size_t r = 0; r < a.rows(); ++r) {
          cplx s{};
          const auto row = a.row(r);
          for (std::size_t c = 0; c < a.cols(); ++c) s += row[c] * in[c];
          out[r] = s;
        }
      },
      rng, tol, max_iter);
}

}  // namespace crd
