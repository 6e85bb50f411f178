#pragma once

#include <cstddef>
#include <vector>

#include "crd/sequences/sequence.hpp"

namespace crd {

/// rho = ceil((R/W)(l - 1)): rows farther apart than rho only involve chips at distance >= l.
std::size_t row_dependence_span(std::size_t W, std::size_t R, std::size_t mdd) noexcept;

/// (W, R, eps) random-demodulator sensing model; R must divide W.
///
/// Row r integrates the modulated Nyquist samples j in [r W/R, (r+1) W/R).
class DemodulatorModel {
 public:
  DemodulatorModel(std::size_t W, std::size_t R, BipolarSequence sequence);

  [[nodiscard]] std::size_t W() const noexcept { return W_; }
  [[nodiscard]] std::size_t R() const noexcept { return R_; }
  /// W / R, the integration window of one measurement.
  [[nodiscard]] std::size_t block() const noexcept { return W_ / R_; }
  [[nodiscard]] const BipolarSequence& sequence() const noexcept { return sequence_; }
  /// The chips as +-1.0.
  [[nodiscard]] const std::vector<double>& signs() const noexcept { return signs_; }
  [[nodiscard]] std::size_t rho(std::size_t mdd) const noexcept { return row_dependence_span(W_, R_, mdd); }

 private:
  std::size_t W_;
  std::size_t R_;
  BipolarSequence sequence_;
  std::vector<double> signs_;
};

}  // namespace crd
