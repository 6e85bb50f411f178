#include <doctest.h>

#include <cmath>
#include <vector>

#include "crd/kernels/kernels.hpp"
#include "crd/numerics/rng.hpp"

using namespace crd;
namespace k = crd::kernels;

namespace {

CVector random_vector(std::size_t n, RngStream& rng, double scale = 1.0) {
  CVector v(n);
  for (auto& x : v) x = {scale * rng.normal(), scale * rng.normal()};
  return v;
}

std::vector<double> random_signs(std::size_t n, RngStream& rng) {
  std::vector<double> s(n);
  for (auto& x : s) x = rng.sign();
  return s;
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar kernels match direct loops") {
    const auto& s = k::table(k::Backend::scalar);
    RngStream rng(1);
    const std::size_t block = 5, rows = 7;
    const CVector x = random_vector(block * rows, rng);
    const auto signs = random_signs(block * rows, rng);
    CVector out(rows);
    s.modulate_block_sum(x, signs, block, out);
    for (std::size_t r = 0; r < rows; ++r) {
      cplx acc{};
      for (std::size_t j = r * block; j < (r + 1) * block; ++j) acc += signs[j] * x[j];
      CHECK(std::abs(out[r] - acc) < 1e-14);
    }
    CVector expanded(block * rows);
    s.modulate_expand(out, signs, block, expanded);
    for (std::size_t j = 0; j < expanded.size(); ++j) CHECK(expanded[j] == signs[j] * out[j / block]);

    const CVector v{{3.0, 4.0}, {0.3, 0.4}, {0.0, 0.0}};
    CVector t(3);
    s.soft_threshold(v, 1.0, t);
    CHECK(std::abs(t[0] - cplx(2.4, 3.2)) < 1e-15);
    CHECK(t[1] == cplx{});
    s.project_linf_ball(v, 1.0, t);
    CHECK(std::abs(t[0] - cplx(0.6, 0.8)) < 1e-15);
    CHECK(t[1] == v[1]);
    CHECK(s.norm2_sq(v) == doctest::Approx(25.25));
    CHECK(s.max_abs(v) == doctest::Approx(5.0));
    CHECK(s.dot(v, v) == cplx(25.25, 0.0));
  }

  TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!k::backend_available(k::Backend::avx2)) {
      MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
      return;
    }
    const auto& s = k::table(k::Backend::scalar);
    const auto& v = k::table(k::Backend::avx2);
    RngStream rng(2);
    for (std::size_t n : {0u, 1u, 2u, 3u, 5u, 8u, 17u, 64u, 481u}) {
      CAPTURE(n);
      const CVector x = random_vector(n, rng), y = random_vector(n, rng);
      CVector a(n), b(n);
      for (double tau : {0.0, 0.7, 1.5}) {
        s.soft_threshold(x, tau, a);
        v.soft_threshold(x, tau, b);
        CHECK(max_diff(a, b) < 1e-14);
        s.project_linf_ball(x, tau + 0.1, a);
        v.project_linf_ball(x, tau + 0.1, b);
        CHECK(max_diff(a, b) < 1e-14);
      }
      s.axpby(0.3, x, -1.7, y, a);
      v.axpby(0.3, x, -1.7, y, b);
      CHECK(max_diff(a, b) < 1e-14);
      CHECK(v.norm2_sq(x) == doctest::Approx(s.norm2_sq(x)).epsilon(1e-13));
      CHECK(std::abs(v.dot(x, y) - s.dot(x, y)) < 1e-12 * (1.0 + std::sqrt(s.norm2_sq(x) * s.norm2_sq(y))));
      CHECK(v.max_abs(x) == doctest::Approx(s.max_abs(x)).epsilon(1e-15));
    }
    for (std::size_t block : {1u, 2u, 3u, 4u, 7u, 16u}) {
      CAPTURE(block);
      const std::size_t rows = 9;
      const CVector x = random_vector(block * rows, rng);
      const auto signs = random_signs(block * rows, rng);
      CVector a(rows), b(rows);
      s.modulate_block_sum(x, signs, block, a);
      v.modulate_block_sum(x, signs, block, b);
      CHECK(max_diff(a, b) < 1e-13);
      CVector ea(block * rows), eb(block * rows);
      s.modulate_expand(a, signs, block, ea);
      v.modulate_expand(a, signs, block, eb);
      CHECK(max_diff(ea, eb) == 0.0);
    }
  }

  TEST_CASE("backend selection can be switched and reported") {
    const auto original = k::active_backend();
    k::set_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    CHECK(k::backend_name(k::Backend::scalar) == "scalar");
    CHECK(k::backend_name(k::Backend::avx2) == "avx2");
    if (k::backend_available(k::Backend::avx2)) {
      k::set_backend(k::Backend::avx2);
      CHECK(k::active_backend() == k::Backend::avx2);
    } else {
      CHECK_THROWS_AS(k::set_backend(k::Backend::avx2), std::invalid_argument);
    }
    k::set_backend(original);
  }
}
