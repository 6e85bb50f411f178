#pragma once

// Data-parallel inner loops shared by the sensing operator and the solvers.
//
// Every kernel has a portable scalar reference and an AVX2 variant; the variant is chosen
// once at startup from CPUID (override with CRD_KERNELS=scalar|avx2) and can be switched
// explicitly for equivalence testing. Complex vectors are interleaved (re, im) doubles.

#include <cstddef>
#include <span>
#include <string_view>

#include "crd/numerics/types.hpp"

namespace crd::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
  /// out[r] = sum_{j in block r} signs[j] * x[j], blocks of `block` consecutive entries.
  void (*modulate_block_sum)(std::span<const cplx> x, std::span<const double> signs, std::size_t block,
                             std::span<cplx> out);
  /// out[j] = signs[j] * y[j / block]; the adjoint of modulate_block_sum.
  void (*modulate_expand)(std::span<const cplx> y, std::span<const double> signs, std::size_t block,
                          std::span<cplx> out);
  /// Complex soft threshold: shrink moduli by tau, keep phases.
  void (*soft_threshold)(std::span<const cplx> x, double tau, std::span<cplx> out);
  /// Clamp every modulus to at most radius.
  void (*project_linf_ball)(std::span<const cplx> x, double radius, std::span<cplx> out);
  /// out = a * x + b * y
  void (*axpby)(double a, std::span<const cplx> x, double b, std::span<const cplx> y, std::span<cplx> out);
  /// sum |x_i|^2
  double (*norm2_sq)(std::span<const cplx> x);
  /// sum conj(x_i) * y_i
  cplx (*dot)(std::span<const cplx> x, std::span<const cplx> y);
  /// max |x_i|
  double (*max_abs)(std::span<const cplx> x);
};

const KernelTable& table(Backend backend);
bool backend_available(Backend backend) noexcept;
std::string_view backend_name(Backend backend) noexcept;

Backend active_backend() noexcept;
/// Throws std::invalid_argument when the CPU lacks the requested ISA.
void set_backend(Backend backend);

inline const KernelTable& active() { return table(active_backend()); }

inline void modulate_block_sum(std::span<const cplx> x, std::span<const double> signs, std::size_t block,
                               std::span<cplx> out) {
  active().modulate_block_sum(x, signs, block, out);
}
inline void modulate_expand(std::span<const cplx> y, std::span<const double> signs, std::size_t block,
                            std::span<cplx> out) {
  active().modulate_expand(y, signs, block, out);
}
inline void soft_threshold(std::span<const cplx> x, double tau, std::span<cplx> out) {
  active().soft_threshold(x, tau, out);
}
inline void project_linf_ball(std::span<const cplx> x, double radius, std::span<cplx> out) {
  active().project_linf_ball(x, radius, out);
}
inline void axpby(double a, std::span<const cplx> x, double b, std::span<const cplx> y, std::span<cplx> out) {
  active().axpby(a, x, b, y, out);
}
inline double norm2_sq(std::span<const cplx> x) { return active().norm2_sq(x); }
inline cplx dot(std::span<const cplx> x, std::span<const cplx> y) { return active().dot(x, y); }
inline double max_abs(std::span<const cplx> x) { return active().max_abs(x); }

}  // namespace crd::kernels
