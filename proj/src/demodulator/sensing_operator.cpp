#include "crd/demodulator/sensing_operator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "crd/kernels/kernels.hpp"

namespace crd {

namespace {

// exp(-2 pi i t / W) / sqrt(W) for t already reduced mod W.
cplx unit_tone(std::size_t t, std::size_t W) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(W);
  return std::polar(1.0 / std::sqrt(static_cast<double>(W)), angle);
}

CVector unit_tones(std::size_t W) {
  CVector tones(W);
  for (std::size_t t = 0; t < W; ++t) tones[t] = unit_tone(t, W);
  return tones;
}

}  // namespace

CMatrix build_explicit(const DemodulatorModel& model) {
  const std::size_t W = model.W();
  if (W > kExplicitMaxW) {
    throw std::invalid_argument(
        fmt::format("build_explicit: W = {} exceeds {}; use SensingOperator instead", W, kExplicitMaxW));
  }
  const CVector tones = unit_tones(W);
  const std::size_t block = model.block();
  const auto& eps = model.signs();
  CMatrix phi(model.R(), W);
  for (std::size_t j = 0; j < W; ++j) {
    const std::size_t r = j / block;
    for (std::size_t w = 0; w < W; ++w) phi(r, w) += eps[j] * tones[j * w % W];
  }
  return phi;
}

SensingOperator::SensingOperator(const DemodulatorModel& model)
    : W_(model.W()), R_(model.R()), block_(model.block()), signs_(model.signs()), tones_(unit_tones(W_)), scratch_(model.W()) {
  if (fft_supported_length(W_)) {
    plan_.emplace(W_);
  } else {
    explicit_ = build_explicit(model);
  }
}

void SensingOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != W_ || y.size() != R_) throw std::invalid_argument("SensingOperator::apply: dimension mismatch");
  if (plan_) {
    plan_->forward(x, scratch_);
    kernels::modulate_block_sum(scratch_, signs_, block_, y);
    return;
  }
  const CMatrix& a = *explicit_;
  for (std::size_t r = 0; r < R_; ++r) {
    cplx s{};
    const auto row = a.row(r);
    for (std::size_t c = 0; c < W_; ++c) s += row[c] * x[c];
    y[r] = s;
  }
}

void SensingOperator::adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  if (y.size() != R_ || x.size() != W_) throw std::invalid_argument("SensingOperator::adjoint: dimension mismatch");
  if (plan_) {
    kernels::modulate_expand(y, signs_, block_, scratch_);
    plan_->inverse(scratch_, x);
    return;
  }
  const CMatrix& a = *explicit_;
  std::fill(x.begin(), x.end(), cplx{});
  for (std::size_t r = 0; r < R_; ++r) {
    const auto row = a.row(r);
    for (std::size_t c = 0; c < W_; ++c) x[c] += std::conj(row[c]) * y[r];
  }
}

void SensingOperator::solve_row_gram(std::span<const cplx> r, std::span<cplx> u) const {
  if (r.size() != R_ || u.size() != R_) throw std::invalid_argument("SensingOperator::solve_row_gram: dimension mismatch");
  const double scale = static_cast<double>(R_) / static_cast<double>(W_);
  for (std::size_t i = 0; i < R_; ++i) u[i] = r[i] * scale;
}

double SensingOperator::mean_row_norm_sq() const { return static_cast<double>(W_) / static_cast<double>(R_); }

CVector SensingOperator::column(std::size_t w) const {
  if (w >= W_) throw std::out_of_range("SensingOperator::column: index out of range");
  CVector out(R_);
  std::size_t t = 0;  // j * w mod W
  for (std::size_t j = 0; j < W_; ++j) {
    out[j / block_] += signs_[j] * tones_[t];
    t += w;
    if (t >= W_) t -= W_;
  }
  return out;
}

}  // namespace crd
