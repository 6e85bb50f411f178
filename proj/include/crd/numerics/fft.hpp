#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crd/numerics/types.hpp"

namespace crd {

/// True when n > 0 factors completely into 2, 3 and 5.
bool fft_supported_length(std::size_t n) noexcept;

/// Unitary DFT with kernel exp(-2*pi*i*n*w/N)/sqrt(N); the inverse uses the conjugate kernel.
///
/// Forward maps tone amplitudes alpha to Nyquist samples x = F alpha, matching the
/// synthesis convention f(t) = sum_w a_w exp(-2*pi*i*w*t). Lengths must be
/// {2,3,5}-smooth; other lengths throw std::invalid_argument.
///
/// A plan owns twiddles and scratch, so one plan must not be shared across threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }

  void forward(std::span<const cplx> in, std::span<cplx> out);
  void inverse(std::span<const cplx> in, std::span<cplx> out);

 private:
  void transform(std::span<const cplx> in, std::span<cplx> out, bool inverse);
  struct Stage {
    std::size_t radix = 0;
    std::size_t span = 0;  ///< length of each input sub-transform
    CVector twiddles;      ///< [k * (radix - 1) + r - 1] = exp(-2*pi*i*r*k/(span*radix))
  };
  void run_stage(const Stage& st, cplx* a) const;

  std::size_t n_;
  double scale_;
  std::vector<std::size_t> radices_;
  std::vector<std::size_t> perm_;  ///< mixed-radix digit reversal: scratch[i] = in[perm_[i]]
  std::vector<Stage> stages_;
  CVector scratch_;
};

/// Convenience wrapper: unitary forward (inverse = false) or inverse DFT.
CVector fft(std::span<const cplx> v, bool inverse = false);

/// O(n^2) unitary DFT for any length; test oracle and fallback path.
CVector dft_naive(std::span<const cplx> v, bool inverse = false);

}  // namespace crd
