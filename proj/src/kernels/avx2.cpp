#include "kernels_impl.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace crd::kernels::avx2 {

namespace {

inline const double* raw(std::span<const cplx> v) { return reinterpret_cast<const double*>(v.data()); }
inline double* raw(std::span<cplx> v) { return reinterpret_cast<double*>(v.data()); }

// [s_j, s_j, s_{j+1}, s_{j+1}]
inline __m256d load_sign_pair(const double* s) {
  const __m128d pair = _mm_loadu_pd(s);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(pair), 0b01010000);
}

// [|x0|^2, |x0|^2, |x1|^2, |x1|^2] for two interleaved complex values
inline __m256d modulus_sq(__m256d v) {
  const __m256d sq = _mm256_mul_pd(v, v);
  return _mm256_hadd_pd(sq, sq);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void modulate_block_sum(std::span<const cplx> x, std::span<const double> signs, std::size_t block,
                        std::span<cplx> out) {
  const double* xp = raw(x);
  const double* sp = signs.data();
  for (std::size_t r = 0; r < out.size(); ++r) {
    const std::size_t base = r * block;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 2 <= block; j += 2) {
      const __m256d v = _mm256_loadu_pd(xp + 2 * (base + j));
      acc = _mm256_fmadd_pd(load_sign_pair(sp + base + j), v, acc);
    }
    const __m128d folded = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    cplx total{_mm_cvtsd_f64(folded), _mm_cvtsd_f64(_mm_unpackhi_pd(folded, folded))};
    for (; j < block; ++j) total += sp[base + j] * x[base + j];
    out[r] = total;
  }
}

void modulate_expand(std::span<const cplx> y, std::span<const double> signs, std::size_t block,
                     std::span<cplx> out) {
  double* op = raw(out);
  const double* sp = signs.data();
  for (std::size_t r = 0; r < y.size(); ++r) {
    const std::size_t base = r * block;
    const __m128d yr = _mm_loadu_pd(reinterpret_cast<const double*>(&y[r]));
    const __m256d yy = _mm256_broadcast_pd(&yr);
    std::size_t j = 0;
    for (; j + 2 <= block; j += 2) _mm256_storeu_pd(op + 2 * (base + j), _mm256_mul_pd(load_sign_pair(sp + base + j), yy));
    for (; j < block; ++j) out[base + j] = sp[base + j] * y[r];
  }
}

void soft_threshold(std::span<const cplx> x, double tau, std::span<cplx> out) {
  const double* xp = raw(x);
  double* op = raw(out);
  const __m256d vtau = _mm256_set1_pd(tau);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) {
    const __m256d v = _mm256_loadu_pd(xp + 2 * i);
    const __m256d mag = _mm256_sqrt_pd(modulus_sq(v));
    const __m256d keep = _mm256_cmp_pd(mag, vtau, _CMP_GT_OQ);
    const __m256d factor = _mm256_sub_pd(one, _mm256_div_pd(vtau, mag));
    _mm256_storeu_pd(op + 2 * i, _mm256_mul_pd(v, _mm256_blendv_pd(zero, factor, keep)));
  }
  for (; i < x.size(); ++i) {
    const double mag = std::abs(x[i]);
    out[i] = mag > tau ? x[i] * (1.0 - tau / mag) : cplx{};
  }
}

void project_linf_ball(std::span<const cplx> x, double radius, std::span<cplx> out) {
  const double* xp = raw(x);
  double* op = raw(out);
  const __m256d vr = _mm256_set1_pd(radius);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) {
    const __m256d v = _mm256_loadu_pd(xp + 2 * i);
    const __m256d mag = _mm256_sqrt_pd(modulus_sq(v));
    const __m256d clamp = _mm256_cmp_pd(mag, vr, _CMP_GT_OQ);
    const __m256d factor = _mm256_blendv_pd(one, _mm256_div_pd(vr, mag), clamp);
    _mm256_storeu_pd(op + 2 * i, _mm256_mul_pd(v, factor));
  }
  for (; i < x.size(); ++i) {
    const double mag = std::abs(x[i]);
    out[i] = mag > radius ? x[i] * (radius / mag) : x[i];
  }
}

void axpby(double a, std::span<const cplx> x, double b, std::span<const cplx> y, std::span<cplx> out) {
  const double* xp = raw(x);
  const double* yp = raw(y);
  double* op = raw(out);
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const std::size_t n = 2 * x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(yp + i));
    _mm256_storeu_pd(op + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(xp + i), t));
  }
  for (; i < n; ++i) op[i] = a * xp[i] + b * yp[i];
}

double norm2_sq(std::span<const cplx> x) {
  const double* xp = raw(x);
  const std::size_t n = 2 * x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(xp + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += xp[i] * xp[i];
  return s;
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  const double* xp = raw(x);
  const double* yp = raw(y);
  const std::size_t n = 2 * x.size();
  __m256d acc_re = _mm256_setzero_pd();  // xr*yr, xi*yi
  __m256d acc_im = _mm256_setzero_pd();  // xr*yi, xi*yr
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(xp + i);
    const __m256d yv = _mm256_loadu_pd(yp + i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im);
  }
  alignas(32) double im_lanes[4];
  _mm256_store_pd(im_lanes, acc_im);
  double re = hsum(acc_re);
  double im = im_lanes[0] - im_lanes[1] + im_lanes[2] - im_lanes[3];
  for (std::size_t k = i / 2; k < x.size(); ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {re, im};
}

double max_abs(std::span<const cplx> x) {
  const double* xp = raw(x);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) best = _mm256_max_pd(best, modulus_sq(_mm256_loadu_pd(xp + 2 * i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < x.size(); ++i) m = std::max(m, std::norm(x[i]));
  return std::sqrt(m);
}

}  // namespace

const KernelTable kTable{modulate_block_sum, modulate_expand, soft_threshold, project_linf_ball,
                         axpby,              norm2_sq,        dot,            max_abs};
const bool kCompiled = true;

}  // namespace crd::kernels::avx2

#else

namespace crd::kernels::avx2 {
const KernelTable kTable{};
const bool kCompiled = false;
}  // namespace crd::kernels::avx2

#endif
