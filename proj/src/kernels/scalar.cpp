#include <cmath>

#include "kernels_impl.hpp"

namespace crd::kernels::scalar {

namespace {

void modulate_block_sum(std::span<const cplx> x, std::span<const double> signs, std::size_t block,
                        std::span<cplx> out) {
  for (std::size_t r = 0; r < out.size(); ++r) {
    cplx acc{};
    const std::size_t base = r * block;
    for (std::size_t j = 0; j < block; ++j) acc += signs[base + j] * x[base + j];
    out[r] = acc;
  }
}

void modulate_expand(std::span<const cplx> y, std::span<const double> signs, std::size_t block,
                     std::span<cplx> out) {
  for (std::size_t r = 0; r < y.size(); ++r) {
    const std::size_t base = r * block;
    for (std::size_t j = 0; j < block; ++j) out[base + j] = signs[base + j] * y[r];
  }
}

void soft_threshold(std::span<const cplx> x, double tau, std::span<cplx> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]);
    out[i] = mag > tau ? x[i] * (1.0 - tau / mag) : cplx{};
  }
}

void project_linf_ball(std::span<const cplx> x, double radius, std::span<cplx> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]);
    out[i] = mag > radius ? x[i] * (radius / mag) : x[i];
  }
}

void axpby(double a, std::span<const cplx> x, double b, std::span<const cplx> y, std::span<cplx> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
}

double norm2_sq(std::span<const cplx> x) {
  double s = 0.0;
  for (const auto& v : x) s += v.real() * v.real() + v.imag() * v.imag();
  return s;
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double max_abs(std::span<const cplx> x) {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, v.real() * v.real() + v.imag() * v.imag());
  return std::sqrt(m);
}

}  // namespace

const KernelTable kTable{modulate_block_sum, modulate_expand, soft_threshold, project_linf_ball,
                         axpby,              norm2_sq,        dot,            max_abs};

}  // namespace crd::kernels::scalar
