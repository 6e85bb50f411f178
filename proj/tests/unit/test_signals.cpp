#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "crd/numerics/rng.hpp"
#include "crd/signals/signals.hpp"

using namespace crd;

namespace {

// Zero-phase Hamming-windowed DFT of a unit tone at frequency nu, evaluated at tone nu + delta:
// (1/W) sum over the W half-integer-centred samples of w(n) exp(-2 pi i delta n / W).
double windowed_dft(double delta, std::size_t W) {
  const double n_w = static_cast<double>(W);
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < W; ++k) {
    const double n = static_cast<double>(k) - (n_w - 1.0) / 2.0;
    const double window = 0.54 + 0.46 * std::cos(2.0 * std::numbers::pi * n / n_w);
    acc += window * std::polar(1.0, -2.0 * std::numbers::pi * delta * n / n_w);
  }
  CHECK(std::abs(acc.imag()) < 1e-9);
  return acc.real() / n_w;
}

}  // namespace

TEST_SUITE("signals") {
  TEST_CASE("sparse signals have S distinct unit-modulus tones") {
    RngStream rng(1);
    const auto dist = ToneDistribution::uniform(64);
    for (std::size_t S : {0u, 1u, 10u, 64u}) {
      const auto s = gen_sparse_signal(64, S, dist, rng);
      CHECK(s.support.size() == S);
      CHECK(std::is_sorted(s.support.begin(), s.support.end()));
      CHECK(std::set<std::size_t>(s.support.begin(), s.support.end()).size() == S);
      for (std::size_t i = 0; i < S; ++i) {
        CHECK(std::abs(s.amplitudes[i]) == doctest::Approx(1.0));
        CHECK(s.alpha[s.support[i]] == s.amplitudes[i]);
      }
      std::size_t nonzero = 0;
      for (const auto& a : s.alpha) nonzero += a != cplx{};
      CHECK(nonzero == S);
    }
    CHECK_THROWS(gen_sparse_signal(64, 65, dist, rng));
    CHECK_THROWS(gen_sparse_signal(32, 1, dist, rng));
  }

  TEST_CASE("weighted draws without replacement follow the sequential inclusion law") {
    const RVector weights{0.1, 0.2, 0.3, 0.4};
    const auto dist = ToneDistribution::custom(weights);
    // P(w in a 2-draw sample) = p_w + sum_{v != w} p_v p_w / (1 - p_v)
    RVector expected(4, 0.0);
    for (std::size_t w = 0; w < 4; ++w) {
      expected[w] = weights[w];
      for (std::size_t v = 0; v < 4; ++v) {
        if (v != w) expected[w] += weights[v] * weights[w] / (1.0 - weights[v]);
      }
    }
    RngStream rng(2);
    const int trials = 100000;
    RVector hits(4, 0.0);
    for (int t = 0; t < trials; ++t) {
      for (auto w : gen_sparse_signal(4, 2, dist, rng).support) hits[w] += 1.0;
    }
    for (std::size_t w = 0; w < 4; ++w) CHECK(hits[w] / trials == doctest::Approx(expected[w]).epsilon(0.02));
  }

  TEST_CASE("zero-weight tones are never drawn") {
    const auto dist = ToneDistribution::custom({0.0, 1.0, 0.0, 2.0, 0.0});
    RngStream rng(3);
    for (int t = 0; t < 200; ++t) {
      const auto s = gen_sparse_signal(5, 2, dist, rng);
      CHECK(s.support == std::vector<std::size_t>{1, 3});
    }
    CHECK_THROWS(gen_sparse_signal(5, 3, dist, rng));
    CHECK_THROWS(ToneDistribution::custom({0.0, 0.0}));
    CHECK_THROWS(ToneDistribution::custom({1.0, -0.5}));
    CHECK(dist.name() == "custom");
    CHECK(ToneDistribution::uniform(3).name() == "uniform");
  }

  TEST_CASE("matched distribution clips negative spectrum values") {
    const auto m = matched_distribution({2.0, -0.5, 1.0, 1.0});
    CHECK(m.clipped == 1);
    CHECK(m.pmf[0] == doctest::Approx(0.5));
    CHECK(m.pmf[1] == 0.0);
    CHECK(m.name() == "matched");
  }

  TEST_CASE("hamming response equals the zero-phase windowed DFT") {
    for (std::size_t W : {64u, 480u, 481u}) {
      for (double delta : {0.0, 0.25, -0.5, 1.0, 1.7, -3.3, 7.9}) {
        CAPTURE(W);
        CAPTURE(delta);
        CHECK(hamming_response(delta, W) == doctest::Approx(windowed_dft(delta, W)).epsilon(1e-10));
      }
    }
    CHECK(hamming_response(0.0, 480) == doctest::Approx(0.54));
  }

  TEST_CASE("leaky tones spread over 16 normalized bins") {
    RngStream rng(5);
    const std::size_t W = 256;
    const auto s = gen_leaky_signal(W, 1, ToneDistribution::uniform(W), rng);
    REQUIRE(s.frequencies.size() == 1);
    const double nu = s.frequencies[0];
    const long base = static_cast<long>(std::floor(nu)) - 7;
    double energy = 0.0;
    std::size_t nonzero = 0;
    for (std::size_t w = 0; w < W; ++w) {
      energy += std::norm(s.alpha[w]);
      nonzero += s.alpha[w] != cplx{};
    }
    CHECK(energy == doctest::Approx(1.0));
    CHECK(nonzero <= kLeakageBins);
    // Moduli follow |H(tone - nu)| up to the common normalization.
    const std::size_t b0 = static_cast<std::size_t>((base + static_cast<long>(W)) % static_cast<long>(W));
    const double ref = std::abs(s.alpha[(b0 + 7) % W]) / std::abs(hamming_response(static_cast<double>(base + 7) - nu, W));
    for (long b = 0; b < 16; ++b) {
      const auto w = static_cast<std::size_t>((base + b + static_cast<long>(W)) % static_cast<long>(W));
      CHECK(std::abs(s.alpha[w]) == doctest::Approx(ref * std::abs(hamming_response(static_cast<double>(base + b) - nu, W))));
    }
    CHECK_THROWS(gen_leaky_signal(64, 5, ToneDistribution::uniform(64), rng));
  }

  TEST_CASE("noise power and SNR bookkeeping") {
    RngStream rng(6);
    const CVector y(50000, cplx(1.0, 1.0));
    const double p = noise_power_for_snr(y, 10.0);
    CHECK(p == doctest::Approx(0.2));
    CHECK(snr_db(y, p) == doctest::Approx(10.0));
    const CVector noisy = add_noise(y, p, rng);
    double power = 0.0;
    cplx mean{};
    for (std::size_t i = 0; i < y.size(); ++i) {
      power += std::norm(noisy[i] - y[i]);
      mean += noisy[i] - y[i];
    }
    CHECK(power / y.size() == doctest::Approx(p).epsilon(0.03));
    CHECK(std::abs(mean) / y.size() < 0.01);
  }

  TEST_CASE("signed tones and CSV rows") {
    CHECK(signed_tone(0, 8) == 0);
    CHECK(signed_tone(4, 8) == 4);
    CHECK(signed_tone(5, 8) == -3);
    SparseSignal s;
    s.W = 4;
    s.support = {2};
    s.amplitudes = {cplx(0.5, -1.0)};
    CHECK(signal_csv(s) == "tone,re,im\n2,0.5,-1\n");
  }
}
