#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "crd/demodulator/delta.hpp"
#include "crd/demodulator/diagnostics.hpp"
#include "crd/demodulator/model.hpp"
#include "crd/demodulator/sensing_operator.hpp"
#include "crd/numerics/hermitian_eig.hpp"
#include "crd/numerics/linalg.hpp"
#include "crd/numerics/rng.hpp"
#include "crd/sequences/statistics.hpp"

using namespace crd;

namespace {

cplx tone(std::size_t j, std::size_t w, std::size_t W) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * w) % W) / static_cast<double>(W);
  return std::polar(1.0 / std::sqrt(static_cast<double>(W)), angle);
}

// phi_{r w} = sum_{j in block r} eps_j f_{j w}, written out entry by entry.
CMatrix reference_phi(const std::vector<double>& eps, std::size_t W, std::size_t R) {
  CMatrix phi(R, W);
  const std::size_t block = W / R;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t w = 0; w < W; ++w) {
      for (std::size_t j = r * block; j < (r + 1) * block; ++j) phi(r, w) += eps[j] * tone(j, w, W);
    }
  }
  return phi;
}

// Delta_{a w} = sum over distinct j, k in one block of conj(f_{j a}) f_{k w} E[eps_j eps_k].
CMatrix reference_delta(const CorrelationModel& model, std::size_t W, std::size_t R) {
  CMatrix d(W, W);
  const std::size_t block = W / R;
  for (std::size_t a = 0; a < W; ++a) {
    for (std::size_t w = 0; w < W; ++w) {
      cplx acc{};
      for (std::size_t b = 0; b < R; ++b) {
        for (std::size_t j = b * block; j < (b + 1) * block; ++j) {
          for (std::size_t k = b * block; k < (b + 1) * block; ++k) {
            if (j != k) acc += std::conj(tone(j, a, W)) * tone(k, w, W) * model.corr(j, k);
          }
        }
      }
      d(a, w) = acc;
    }
  }
  return d;
}

double max_diff(const CMatrix& a, const CMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

DemodulatorModel random_model(std::size_t W, std::size_t R, std::uint64_t seed) {
  RngStream rng(seed);
  return DemodulatorModel(W, R, gen_rademacher(W, rng));
}

}  // namespace

TEST_SUITE("demodulator") {
  TEST_CASE("model validates its dimensions") {
    RngStream rng(1);
    CHECK_THROWS(DemodulatorModel(30, 7, gen_rademacher(30, rng)));
    CHECK_THROWS(DemodulatorModel(30, 6, gen_rademacher(31, rng)));
    CHECK_THROWS(DemodulatorModel(30, 0, gen_rademacher(30, rng)));
    const DemodulatorModel m(30, 6, gen_rademacher(30, rng));
    CHECK(m.block() == 5);
    CHECK(m.signs().size() == 30);
    CHECK(row_dependence_span(1024, 16, 14) == 1);
    CHECK(row_dependence_span(1024, 512, 14) == 7);
    CHECK(row_dependence_span(1024, 512, 1) == 0);
    CHECK(m.rho(6) == 1);
  }

  TEST_CASE("explicit matrix matches the entrywise definition") {
    const auto m = random_model(48, 8, 2);
    CHECK(max_diff(build_explicit(m), reference_phi(m.signs(), 48, 8)) < 1e-13);
  }

  TEST_CASE("fast and fallback operators agree with the explicit matrix") {
    for (auto [W, R] : {std::pair<std::size_t, std::size_t>{480, 24}, {512, 64}, {42, 6}, {45, 45}}) {
      CAPTURE(W);
      const auto m = random_model(W, R, 3 + W);
      const SensingOperator op(m);
      CHECK(op.uses_fft() == fft_supported_length(W));
      const CMatrix phi = reference_phi(m.signs(), W, R);
      RngStream rng(4);
      CVector x(W), y(R);
      for (auto& v : x) v = {rng.normal(), rng.normal()};
      for (auto& v : y) v = {rng.normal(), rng.normal()};
      CVector ax(R), aty(W);
      op.apply(x, ax);
      op.adjoint(y, aty);
      const CVector ex = matvec(phi, x), ey = adjoint_matvec(phi, y);
      for (std::size_t r = 0; r < R; ++r) CHECK(std::abs(ax[r] - ex[r]) < 1e-11);
      for (std::size_t w = 0; w < W; ++w) CHECK(std::abs(aty[w] - ey[w]) < 1e-11);
      for (std::size_t w : {std::size_t{0}, W / 3, W - 1}) {
        const CVector col = op.column(w);
        for (std::size_t r = 0; r < R; ++r) CHECK(std::abs(col[r] - phi(r, w)) < 1e-12);
      }
      CHECK(op.mean_row_norm_sq() == doctest::Approx(static_cast<double>(W) / R));
      CHECK_THROWS(op.column(W));
    }
  }

  TEST_CASE("rows are orthogonal with squared norm W/R") {
    const auto m = random_model(60, 12, 5);
    const CMatrix phi = build_explicit(m);
    for (std::size_t a = 0; a < 12; ++a) {
      for (std::size_t b = 0; b < 12; ++b) {
        cplx s{};
        for (std::size_t w = 0; w < 60; ++w) s += phi(a, w) * std::conj(phi(b, w));
        CHECK(std::abs(s - (a == b ? 5.0 : 0.0)) < 1e-12);
      }
    }
    const SensingOperator op(m);
    CVector r(12, cplx(1.0, 2.0)), u(12);
    op.solve_row_gram(r, u);
    CHECK(std::abs(u[3] - cplx(0.2, 0.4)) < 1e-15);
  }

  TEST_CASE("delta equals the brute-force correlation sum") {
    const auto chain = MarkovChain::maxentropic(1, 4);
    for (const auto& [model, W, R] : {std::tuple{CorrelationModel::rcs(1), std::size_t{32}, std::size_t{4}},
                                      std::tuple{CorrelationModel::rcs(2), std::size_t{36}, std::size_t{6}},
                                      std::tuple{correlation_model(SequenceFamily::mrs(1, 4), &chain), std::size_t{60},
                                                 std::size_t{6}},
                                      std::tuple{correlation_model(SequenceFamily::mrs(1, 4), &chain), std::size_t{42},
                                                 std::size_t{3}}}) {
      CAPTURE(W);
      const auto delta = compute_delta(model, W, R);
      CHECK(max_diff(delta.entries, reference_delta(model, W, R)) < 1e-12);
      CHECK(is_hermitian(delta.entries, 1e-13));
    }
  }

  TEST_CASE("delta is the exact mean of Phi^* Phi - I over all rcs sign patterns") {
    const std::size_t W = 8, R = 2;
    CMatrix mean(W, W);
    for (int pattern = 0; pattern < 16; ++pattern) {
      std::vector<double> eps(W);
      for (std::size_t j = 0; j < W; ++j) eps[j] = (pattern >> (j / 2)) & 1 ? 1.0 : -1.0;
      const CMatrix g = gram(reference_phi(eps, W, R));
      for (std::size_t i = 0; i < mean.data().size(); ++i) mean.data()[i] += g.data()[i] / 16.0;
    }
    for (std::size_t i = 0; i < W; ++i) mean(i, i) -= 1.0;
    CHECK(max_diff(mean, compute_delta(CorrelationModel::rcs(1), W, R).entries) < 1e-14);
  }

  TEST_CASE("rademacher delta vanishes and rcs lambda_00 is one") {
    const auto rad = compute_delta(correlation_model(SequenceFamily::rademacher(), nullptr), 256, 16);
    for (const auto& v : rad.entries.data()) CHECK(v == cplx{});
    const auto rcs = compute_delta(CorrelationModel::rcs(1), 256, 16);
    CHECK(rcs.lambda_diagonal()[0] == 1.0);
    CHECK(rcs.entries(0, 0).real() == doctest::Approx(1.0));
    CHECK_FALSE(rcs.window_exceeded);
    const auto tight = compute_delta(CorrelationModel::rcs(3), 64, 32);
    CHECK(tight.window_exceeded);
  }

  TEST_CASE("delta norm and its S-restricted bounds") {
    const auto chain = MarkovChain::maxentropic(1, 20);
    const auto delta = compute_delta(correlation_model(SequenceFamily::mrs(1, 20), &chain), 128, 8);
    const auto eig = hermitian_eig(delta.entries);
    const double exact = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
    CHECK(delta.spectral_norm() == doctest::Approx(exact).epsilon(1e-6));
    const auto lambda = delta.lambda_diagonal();
    for (std::size_t w = 0; w < 128; w += 17) {
      double col = 0.0;
      for (std::size_t a = 0; a < 128; ++a) col += std::norm(delta.entries(a, w));
      CHECK(lambda[w] == doctest::Approx(col).epsilon(1e-12));
    }
    const auto b = delta_norm_bounds(delta, 10, RngStream(3));
    double diag = 0.0;
    for (std::size_t w = 0; w < 128; ++w) diag = std::max(diag, std::abs(delta.entries(w, w)));
    CHECK(b.lower >= diag - 1e-12);
    CHECK(b.lower <= b.upper + 1e-12);
    CHECK(b.upper <= exact * (1.0 + 1e-6));
    const auto full = delta_norm_bounds(delta, 128, RngStream(3), 2);
    CHECK(full.lower == doctest::Approx(exact).epsilon(1e-8));
  }

  TEST_CASE("submatrix extrema against the Gram eigenvalues") {
    const auto m = random_model(64, 16, 9);
    const std::vector<std::size_t> cols{1, 5, 9, 33, 60};
    const auto e = column_submatrix_extrema(m, cols);
    const CMatrix phi = build_explicit(m);
    CMatrix sub(16, cols.size());
    for (std::size_t r = 0; r < 16; ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = phi(r, cols[c]);
    }
    const auto p = hermitian_spectral_norm(gram(sub), RngStream(1), 1e-13, 100000);
    CHECK(e.sigma_max == doctest::Approx(std::sqrt(p.norm)).epsilon(1e-8));
    CHECK(e.sigma_min > 0.0);
    CHECK(e.sigma_min <= e.sigma_max);
    // sigma_min^2 <= each column's squared norm <= sigma_max^2
    for (std::size_t c = 0; c < cols.size(); ++c) {
      double n2 = 0.0;
      for (std::size_t r = 0; r < 16; ++r) n2 += std::norm(sub(r, c));
      CHECK(e.sigma_min * e.sigma_min <= n2 + 1e-12);
      CHECK(n2 <= e.sigma_max * e.sigma_max + 1e-12);
    }
  }

  TEST_CASE("submatrix study is independent of the thread count") {
    const auto src = SequenceSource::make(SequenceFamily::mrs(1, 4));
    const auto a = submatrix_extrema(src, 128, 16, 6, 12, RngStream(4), 1);
    const auto b = submatrix_extrema(src, 128, 16, 6, 12, RngStream(4), 3);
    REQUIRE(a.trials.size() == 12);
    for (std::size_t t = 0; t < 12; ++t) {
      CHECK(a.trials[t].sigma_min == b.trials[t].sigma_min);
      CHECK(a.trials[t].sigma_max == b.trials[t].sigma_max);
    }
    CHECK(a.mean_max == b.mean_max);
    const auto csv = extrema_csv("mrs(1,4)", 128, 16, 6, a);
    CHECK(csv.rfind("family,W,R,S,trial,sigma_min,sigma_max\n\"mrs(1,4)\",128,16,6,0,", 0) == 0);
  }

  TEST_CASE("coherence, column norms and entry bounds") {
    CMatrix a(2, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    a(0, 2) = 1.0;
    a(1, 2) = 1.0;
    CHECK(coherence(a) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(column_norm_deviation(a) == doctest::Approx(3.0));
    CHECK(max_entry(a) == doctest::Approx(2.0));
    CHECK(componentwise_bound(2, 512, 64) == doctest::Approx(std::sqrt(20.0 * std::log(512.0) / 64.0)));
    const auto terms = coherence_model_terms(4, 1024, 16, 2.0);
    CHECK(terms.lead == doctest::Approx(4.0 * std::sqrt(std::log(1024.0) / 16.0)));
    CHECK(terms.tail == doctest::Approx(std::log(1024.0) / 32.0 * 16.0 * std::sqrt(3.0) * 4.0));
    CHECK(terms.fitted_constant(terms.lead * 2.0 + terms.tail) == doctest::Approx(2.0));
  }
}
