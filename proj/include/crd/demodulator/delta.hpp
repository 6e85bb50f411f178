#pragma once

#include <cstddef>

#include "crd/numerics/rng.hpp"
#include "crd/numerics/types.hpp"
#include "crd/sequences/statistics.hpp"

namespace crd {

/// Delta = E[Phi^* Phi] - I for a sequence with the given correlation model.
struct DeltaMatrix {
  std::size_t W = 0;
  std::size_t R = 0;
  CMatrix entries;  ///< W x W, Hermitian
  /// Set when the correlation length reaches the integration window W/R.
  bool window_exceeded = false;

  /// Lambda_ww = (Delta^* Delta)_ww, the squared norm of column w.
  [[nodiscard]] RVector lambda_diagonal() const;
  /// Spectral norm by power iteration (tol 1e-8, at most 1e4 iterations).
  [[nodiscard]] double spectral_norm(std::uint64_t seed = 0x5eed) const;
};

/// Delta_{a w} = sum_{j != k, same block} conj(f_{j a}) f_{k w} E[eps_j eps_k].
///
/// Column w is the inverse DFT of g_w(j) = W^{-1/2} sum_k exp(-2 pi i k w / W) E[eps_j eps_k]
/// over the partners k of j, so each column costs O(W l + W log W).
DeltaMatrix compute_delta(const CorrelationModel& corr, std::size_t W, std::size_t R);

struct NormBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Sandwich lower <= |||Delta|||_S <= upper. upper is the full spectral norm; lower is the
/// largest ||Delta restricted to Omega x Omega|| over all singletons, the S tones with the
/// largest |Delta_ww|, and `samples` random S-subsets.
NormBounds delta_norm_bounds(const DeltaMatrix& delta, std::size_t S, RngStream rng, std::size_t samples = 64);

}  // namespace crd
