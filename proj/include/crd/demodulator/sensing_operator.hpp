#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "crd/demodulator/model.hpp"
#include "crd/numerics/fft.hpp"
#include "crd/numerics/linear_operator.hpp"
#include "crd/numerics/types.hpp"

namespace crd {

/// Largest W the explicit-matrix path accepts.
inline constexpr std::size_t kExplicitMaxW = 4096;

/// Explicit R x W matrix Phi = H D F with phi_{r w} = sum_{j in block r} eps_j f_{j w}.
CMatrix build_explicit(const DemodulatorModel& model);

/// Phi = H D F applied without forming the matrix.
///
/// The fast path needs a {2,3,5}-smooth W; other W fall back to the explicit matrix.
/// Phi Phi^* = (W/R) I for every bipolar sequence, which makes row-Gram solves a scaling.
class SensingOperator final : public LinearOperator {
 public:
  explicit SensingOperator(const DemodulatorModel& model);

  [[nodiscard]] std::size_t rows() const override { return R_; }
  [[nodiscard]] std::size_t cols() const override { return W_; }
  void apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  void solve_row_gram(std::span<const cplx> r, std::span<cplx> u) const override;
  [[nodiscard]] CVector column(std::size_t j) const override;
  /// Exactly W / R.
  [[nodiscard]] double mean_row_norm_sq() const override;
  [[nodiscard]] bool uses_fft() const noexcept { return plan_.has_value(); }

 private:
  std::size_t W_;
  std::size_t R_;
  std::size_t block_;
  std::vector<double> signs_;
  CVector tones_;  ///< exp(-2 pi i t / W) / sqrt(W)
  mutable std::optional<FftPlan> plan_;
  std::optional<CMatrix> explicit_;
  mutable CVector scratch_;
};

}  // namespace crd
