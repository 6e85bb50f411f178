#include "crd/numerics/hermitian_eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace crd {

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, max_abs(a.data()));
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(a(i, i).imag()) > tol * scale) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale) return false;
    }
  }
  return true;
}

namespace {

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

HermitianEigen hermitian_eig(const CMatrix& input, double hermitian_tol, int max_sweeps) {
  const std::size_t n = input.rows();
  if (n == 0 || input.cols() != n) throw std::invalid_argument("hermitian_eig: matrix must be square and non-empty");
  if (n > 512) throw std::invalid_argument(fmt::format("hermitian_eig: dimension {} exceeds the 512 limit", n));
  if (!is_hermitian(input, hermitian_tol)) throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");

  // Work on the exactly-Hermitian part so rounding asymmetry cannot stall the sweeps.
  CMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = input(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = 0.5 * (input(i, j) + std::conj(input(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  CMatrix v = CMatrix::identity(n);

  double frob = 0.0;
  for (const auto& x : a.data()) frob += std::norm(x);
  frob = std::sqrt(frob);
  const double target = std::max(frob, 1e-300) * 1e-15;

  int sweep = 0;
  double off = off_diagonal_norm(a);
  while (off > target) {
    if (sweep++ >= max_sweeps) {
      throw ConvergenceError(fmt::format("hermitian_eig: no convergence after {} sweeps (off-diagonal {:.3e})",
                                         max_sweeps, off),
                             off);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300 || mag < 1e-18 * target) continue;

        // Rotate the phase out of a(p,q): column q *= e^{-i phi}, row q *= e^{i phi}.
        const cplx phase = a(p, q) / mag;
        const cplx phase_conj = std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          a(k, q) *= phase_conj;
          v(k, q) *= phase_conj;
        }
        for (std::size_t k = 0; k < n; ++k) a(q, k) *= phase;
        a(p, q) = mag;
        a(q, p) = mag;

        // Real symmetric Jacobi rotation on the (p, q) plane.
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    off = off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  HermitianEigen out{RVector(n), CMatrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

}  // namespace crd
