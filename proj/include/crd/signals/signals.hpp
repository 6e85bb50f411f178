#pragma once

#include <cstddef>
#include <string>
#include <span>
#include <vector>

#include "crd/numerics/rng.hpp"
#include "crd/numerics/types.hpp"

namespace crd {

/// Number of integral tones a leaky (non-integral) tone spreads over.
inline constexpr std::size_t kLeakageBins = 16;

enum class ToneProvenance { uniform, matched, custom };

/// Probability mass over the W tone indices 0..W-1.
struct ToneDistribution {
  RVector pmf;
  ToneProvenance provenance = ToneProvenance::uniform;
  /// Tones whose spectrum value was negative and clipped to zero (matched only).
  std::size_t clipped = 0;

  static ToneDistribution uniform(std::size_t W);
  /// Normalizes nonnegative weights; throws on negative entries or zero total.
  static ToneDistribution custom(RVector weights);

  [[nodiscard]] std::size_t size() const noexcept { return pmf.size(); }
  [[nodiscard]] std::string name() const;
};

/// pmf proportional to max(F(w), 0).
ToneDistribution matched_distribution(const RVector& spectrum);

/// Signed frequency of tone index w: w for w <= W/2, w - W above.
long signed_tone(std::size_t w, std::size_t W) noexcept;

struct SparseSignal {
  std::size_t W = 0;
  std::size_t S = 0;                ///< number of drawn tones
  std::vector<std::size_t> support;  ///< sorted indices of nonzero coefficients
  CVector amplitudes;               ///< alpha at `support`
  CVector alpha;                    ///< dense coefficients
  RVector frequencies;              ///< drawn continuous frequencies (leaky signals only)
};

/// S distinct tones by sequential weighted draws without replacement; unit-modulus
/// amplitudes with uniform phases.
SparseSignal gen_sparse_signal(std::size_t W, std::size_t S, const ToneDistribution& dist, RngStream& rng);

/// Hamming-window response at offset delta (tone minus frequency), zero phase:
/// 0.54 D(delta) + 0.23 (D(delta - 1) + D(delta + 1)) with D(x) = sin(pi x) / (W sin(pi x / W)).
double hamming_response(double delta, std::size_t W);

/// S continuous frequencies nu = w + u (w from dist, u uniform on [0, 1)). Each spreads
/// over the 16 tones floor(nu)-7 .. floor(nu)+8 (mod W) with l2-normalized Hamming-window
/// coefficients times a uniform random phase; overlapping contributions add.
SparseSignal gen_leaky_signal(std::size_t W, std::size_t S, const ToneDistribution& dist, RngStream& rng);

/// y + sqrt(p) w with w circular complex Gaussian of unit variance per entry.
CVector add_noise(std::span<const cplx> y, double p, RngStream& rng);

/// p giving the requested 10 log10(mean |y|^2 / p).
double noise_power_for_snr(std::span<const cplx> y, double snr_db);
/// 10 log10(mean |y|^2 / p)
double snr_db(std::span<const cplx> y, double p);

/// "tone,re,im" rows for the support.
std::string signal_csv(const SparseSignal& signal);

}  // namespace crd
