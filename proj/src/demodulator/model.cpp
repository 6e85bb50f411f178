#include "crd/demodulator/model.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace crd {

DemodulatorModel::DemodulatorModel(std::size_t W, std::size_t R, BipolarSequence sequence)
    : W_(W), R_(R), sequence_(std::move(sequence)) {
  if (W == 0 || R == 0) throw std::invalid_argument("DemodulatorModel: W and R must be positive");
  if (W % R != 0) throw std::invalid_argument(fmt::format("DemodulatorModel: R = {} does not divide W = {}", R, W));
  if (sequence_.size() != W) {
    throw std::invalid_argument(
        fmt::format("DemodulatorModel: sequence length {} differs from W = {}", sequence_.size(), W));
  }
  signs_ = sequence_.as_doubles();
}

std::size_t row_dependence_span(std::size_t W, std::size_t R, std::size_t mdd) noexcept {
  if (mdd <= 1 || W == 0) return 0;
  return ((mdd - 1) * R + W - 1) / W;
}

}  // namespace crd
