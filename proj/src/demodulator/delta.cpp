#include "crd/demodulator/delta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "crd/numerics/fft.hpp"
#include "crd/numerics/hermitian_eig.hpp"
#include "crd/numerics/linalg.hpp"

namespace crd {

RVector DeltaMatrix::lambda_diagonal() const {
  RVector lam(W, 0.0);
  for (std::size_t a = 0; a < W; ++a) {
    const auto row = entries.row(a);
    for (std::size_t w = 0; w < W; ++w) lam[w] += std::norm(row[w]);
  }
  return lam;
}

double DeltaMatrix::spectral_norm(std::uint64_t seed) const {
  return hermitian_spectral_norm(entries, RngStream(seed)).norm;
}

DeltaMatrix compute_delta(const CorrelationModel& corr, std::size_t W, std::size_t R) {
  if (W == 0 || R == 0 || W % R != 0) throw std::invalid_argument("compute_delta: R must divide W");
  const std::size_t block = W / R;
  const std::size_t reach = corr.length();  // lags >= reach are uncorrelated

  DeltaMatrix delta;
  delta.W = W;
  delta.R = R;
  delta.entries = CMatrix(W, W);
  delta.window_exceeded = reach > block;

  const double scale = 1.0 / std::sqrt(static_cast<double>(W));
  CVector tones(W);
  for (std::size_t t = 0; t < W; ++t) {
    tones[t] = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(W));
  }

  std::optional<FftPlan> plan;
  if (fft_supported_length(W)) plan.emplace(W);
  CVector g(W), column(W);
  for (std::size_t w = 0; w < W; ++w) {
    for (std::size_t j = 0; j < W; ++j) {
      const std::size_t start = j - j % block;
      const std::size_t lo = std::max(start, j + 1 > reach ? j + 1 - reach : 0);
      const std::size_t hi = std::min(start + block, j + reach);
      cplx s{};
      for (std::size_t k = lo; k < hi; ++k) {
        if (k == j) continue;
        const double c = corr.corr(j, k);
        if (c != 0.0) s += c * tones[k * w % W];
      }
      g[j] = s;
    }
    if (plan) {
      plan->inverse(g, column);
    } else {
      column = dft_naive(g, true);
    }
    for (std::size_t a = 0; a < W; ++a) delta.entries(a, w) = column[a];
  }
  // Exact symmetrization removes FFT roundoff asymmetry.
  for (std::size_t a = 0; a < W; ++a) {
    for (std::size_t w = a; w < W; ++w) {
      const cplx avg = 0.5 * (delta.entries(a, w) + std::conj(delta.entries(w, a)));
      delta.entries(a, w) = avg;
      delta.entries(w, a) = std::conj(avg);
    }
  }
  return delta;
}

namespace {

double principal_norm(const CMatrix& a, const std::vector<std::size_t>& idx) {
  CMatrix sub(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = a(idx[i], idx[j]);
  }
  const auto eig = hermitian_eig(sub);
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

}  // namespace

NormBounds delta_norm_bounds(const DeltaMatrix& delta, std::size_t S, RngStream rng, std::size_t samples) {
  if (S == 0) throw std::invalid_argument("delta_norm_bounds: S must be >= 1");
  const std::size_t W = delta.W;
  S = std::min(S, W);
  NormBounds b;
  for (std::size_t w = 0; w < W; ++w) b.lower = std::max(b.lower, std::abs(delta.entries(w, w)));
  if (b.lower == 0.0 && max_abs(delta.entries.data()) == 0.0) return b;

  if (S > 1) {
    std::vector<std::size_t> order(W);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return std::abs(delta.entries(x, x)) > std::abs(delta.entries(y, y));
    });
    order.resize(S);
    b.lower = std::max(b.lower, principal_norm(delta.entries, order));

    std::vector<std::size_t> pool(W);
    for (std::size_t s = 0; s < samples; ++s) {
      std::iota(pool.begin(), pool.end(), 0);
      for (std::size_t i = 0; i < S; ++i) std::swap(pool[i], pool[i + rng.uniform_index(W - i)]);
      b.lower = std::max(b.lower, principal_norm(delta.entries, {pool.begin(), pool.begin() + static_cast<long>(S)}));
    }
  }
  b.upper = std::max(delta.spectral_norm(rng.next_u64()), b.lower);
  return b;
}

}  // namespace crd
