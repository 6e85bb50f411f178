#include "crd/numerics/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace crd {

namespace {

// Radix 4 first, then 2, 3, 5; every stage is a hand-written butterfly.
std::vector<std::size_t> factorize(std::size_t n) {
  std::vector<std::size_t> radices;
  while (n % 4 == 0) {
    radices.push_back(4);
    n /= 4;
  }
  for (std::size_t p : {std::size_t{2}, std::size_t{3}, std::size_t{5}}) {
    while (n % p == 0) {
      radices.push_back(p);
      n /= p;
    }
  }
  if (n != 1) return {};
  return radices;
}

// Plain complex product; std::complex operator* carries inf/nan recovery that costs a libcall.
inline cplx mul(cplx a, cplx b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}
inline cplx minus_i(cplx a) noexcept { return {a.imag(), -a.real()}; }

void fill_permutation(std::vector<std::size_t>& perm, const std::vector<std::size_t>& radices, std::size_t in,
                      std::size_t stride, std::size_t out, std::size_t n, std::size_t level) {
  if (n == 1) {
    perm[out] = in;
    return;
  }
  const std::size_t p = radices[level];
  const std::size_t m = n / p;
  for (std::size_t r = 0; r < p; ++r) fill_permutation(perm, radices, in + r * stride, stride * p, out + r * m, m, level + 1);
}

}  // namespace

bool fft_supported_length(std::size_t n) noexcept {
  if (n == 0) return false;
  if (n == 1) return true;
  return !factorize(n).empty();
}

FftPlan::FftPlan(std::size_t n) : n_(n), scale_(0.0) {
  if (!fft_supported_length(n)) {
    throw std::invalid_argument("fft: length " + std::to_string(n) +
                                " unsupported; the fast transform needs a length whose only prime factors are 2, 3 and 5");
  }
  scale_ = 1.0 / std::sqrt(static_cast<double>(n));
  if (n > 1) radices_ = factorize(n);
  perm_.resize(n);
  fill_permutation(perm_, radices_, 0, 1, 0, n, 0);

  // Stage for level l transforms blocks of n_l = prod(radices[l..]); twiddles w_{n_l}^{r k}.
  stages_.resize(radices_.size());
  std::size_t len = 1;
  for (std::size_t l = radices_.size(); l-- > 0;) {
    Stage& st = stages_[l];
    st.radix = radices_[l];
    st.span = len;
    len *= st.radix;
    st.twiddles.resize(st.span * (st.radix - 1));
    for (std::size_t k = 0; k < st.span; ++k) {
      for (std::size_t r = 1; r < st.radix; ++r) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(r * k) / static_cast<double>(len);
        st.twiddles[k * (st.radix - 1) + (r - 1)] = {std::cos(angle), std::sin(angle)};
      }
    }
  }
  scratch_.resize(n);
}

void FftPlan::forward(std::span<const cplx> in, std::span<cplx> out) { transform(in, out, false); }

void FftPlan::inverse(std::span<const cplx> in, std::span<cplx> out) { transform(in, out, true); }

void FftPlan::transform(std::span<const cplx> in, std::span<cplx> out, bool inverse) {
  if (in.size() != n_ || out.size() != n_) {
    throw std::invalid_argument("fft: expected length " + std::to_string(n_) + ", got " +
                                std::to_string(in.size()) + " -> " + std::to_string(out.size()));
  }
  // Inverse = conj(F conj(x)). Permuting into scratch_ keeps in == out legal.
  for (std::size_t i = 0; i < n_; ++i) {
    const cplx v = in[perm_[i]];
    scratch_[i] = inverse ? std::conj(v) : v;
  }
  cplx* a = scratch_.data();
  for (std::size_t l = stages_.size(); l-- > 0;) run_stage(stages_[l], a);
  for (std::size_t i = 0; i < n_; ++i) {
    const cplx v = scratch_[i] * scale_;
    out[i] = inverse ? std::conj(v) : v;
  }
}

void FftPlan::run_stage(const Stage& st, cplx* a) const {
  const std::size_t m = st.span;
  const std::size_t p = st.radix;
  const std::size_t block = m * p;
  const cplx* tw = st.twiddles.data();
  constexpr double kS3 = 0.86602540378443864676;  // sin(pi/3)
  const double c1 = std::cos(2.0 * std::numbers::pi / 5.0), c2 = std::cos(4.0 * std::numbers::pi / 5.0);
  const double s1 = std::sin(2.0 * std::numbers::pi / 5.0), s2 = std::sin(4.0 * std::numbers::pi / 5.0);
  for (std::size_t base = 0; base < n_; base += block) {
    cplx* b = a + base;
    for (std::size_t k = 0; k < m; ++k) {
      const cplx* w = tw + k * (p - 1);
      switch (p) {
        case 2: {
          const cplx t0 = b[k], t1 = mul(w[0], b[k + m]);
          b[k] = t0 + t1;
          b[k + m] = t0 - t1;
          break;
        }
        case 3: {
          const cplx t0 = b[k], t1 = mul(w[0], b[k + m]), t2 = mul(w[1], b[k + 2 * m]);
          const cplx s = t1 + t2, d = minus_i(t1 - t2) * kS3, h = t0 - 0.5 * s;
          b[k] = t0 + s;
          b[k + m] = h + d;
          b[k + 2 * m] = h - d;
          break;
        }
        case 4: {
          const cplx t0 = b[k], t1 = mul(w[0], b[k + m]), t2 = mul(w[1], b[k + 2 * m]), t3 = mul(w[2], b[k + 3 * m]);
          const cplx e0 = t0 + t2, e1 = t0 - t2, o0 = t1 + t3, o1 = minus_i(t1 - t3);
          b[k] = e0 + o0;
          b[k + m] = e1 + o1;
          b[k + 2 * m] = e0 - o0;
          b[k + 3 * m] = e1 - o1;
          break;
        }
        default: {
          const cplx t0 = b[k], t1 = mul(w[0], b[k + m]), t2 = mul(w[1], b[k + 2 * m]), t3 = mul(w[2], b[k + 3 * m]),
                     t4 = mul(w[3], b[k + 4 * m]);
          const cplx a1 = t1 + t4, b1 = t1 - t4, a2 = t2 + t3, b2 = t2 - t3;
          const cplx r1 = t0 + c1 * a1 + c2 * a2, r2 = t0 + c2 * a1 + c1 * a2;
          const cplx i1 = minus_i(s1 * b1 + s2 * b2), i2 = minus_i(s2 * b1 - s1 * b2);
          b[k] = t0 + a1 + a2;
          b[k + m] = r1 + i1;
          b[k + 4 * m] = r1 - i1;
          b[k + 2 * m] = r2 + i2;
          b[k + 3 * m] = r2 - i2;
          break;
        }
      }
    }
  }
}

CVector fft(std::span<const cplx> v, bool inverse) {
  FftPlan plan(v.size());
  CVector out(v.size());
  if (inverse) {
    plan.inverse(v, out);
  } else {
    plan.forward(v, out);
  }
  return out;
}

CVector dft_naive(std::span<const cplx> v, bool inverse) {
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("dft_naive: empty input");
  const double sign = inverse ? 1.0 : -1.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{};
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
      acc += v[j] * cplx{std::cos(angle), std::sin(angle)};
    }
    out[k] = acc * scale;
  }
  return out;
}

}  // namespace crd
