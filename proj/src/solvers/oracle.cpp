#include <cmath>

#include <fmt/format.h>

#include "crd/numerics/linalg.hpp"
#include "crd/solvers/solvers.hpp"

namespace crd {

namespace {

// Calls visit(idx) for every increasing k-subset of {0..n-1}.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  for (;;) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

OracleResult exhaustive_oracle(const CMatrix& phi, std::span<const cplx> y, std::size_t s_max, double fit_tol) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  if (n > 20 || s_max > 3) throw std::invalid_argument("exhaustive_oracle: needs W <= 20 and S_max <= 3");
  if (y.size() != m) throw std::invalid_argument("exhaustive_oracle: y length differs from the matrix rows");
  const double tol = fit_tol * std::max(1.0, norm2(y));

  OracleResult best;
  if (norm2(y) <= tol) {
    best.status = OracleStatus::unique;
    best.estimate.assign(n, cplx{});
    best.fitting_supports = 1;
    return best;
  }
  for (std::size_t s = 1; s <= s_max; ++s) {
    for_each_subset(n, s, [&](const std::vector<std::size_t>& support) {
      CMatrix sub(m, s);
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < s; ++c) sub(r, c) = phi(r, support[c]);
      }
      const auto coef = least_squares_qr(sub, y);
      if (!coef) return;
      double res = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        cplx v = -y[r];
        for (std::size_t c = 0; c < s; ++c) v += sub(r, c) * (*coef)[c];
        res += std::norm(v);
      }
      if (std::sqrt(res) > tol) return;
      if (best.fitting_supports++ == 0) {
        best.support = support;
        best.estimate.assign(n, cplx{});
        for (std::size_t c = 0; c < s; ++c) best.estimate[support[c]] = (*coef)[c];
      }
    });
    if (best.fitting_supports > 0) {
      best.sparsity = s;
      best.status = best.fitting_supports == 1 ? OracleStatus::unique : OracleStatus::not_unique;
      return best;
    }
  }
  best.status = OracleStatus::infeasible;
  return best;
}

std::string oracle_status_name(OracleStatus status) {
  switch (status) {
    case OracleStatus::unique:
      return "unique";
    case OracleStatus::not_unique:
      return "not_unique";
    case OracleStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

}  // namespace crd
