#include "crd/signals/signals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace crd {

namespace {

// Binary indexed tree over nonnegative weights supporting removal and sampling.
class WeightTree {
 public:
  explicit WeightTree(const RVector& weights) : tree_(weights.size() + 1, 0.0), weights_(weights) {
    for (std::size_t i = 0; i < weights.size(); ++i) add(i, weights[i]);
    top_ = 1;
    while (top_ * 2 <= weights.size()) top_ *= 2;
  }

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (std::size_t i = weights_.size(); i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

  void remove(std::size_t i) {
    add(i, -weights_[i]);
    weights_[i] = 0.0;
  }

  // Smallest index whose prefix sum exceeds target.
  [[nodiscard]] std::size_t find(double target) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return std::min(pos, weights_.size() - 1);
  }

  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }

 private:
  void add(std::size_t i, double v) {
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += v;
  }

  std::vector<double> tree_;
  RVector weights_;
  std::size_t top_ = 1;
};

std::vector<std::size_t> draw_tones(std::size_t S, const ToneDistribution& dist, RngStream& rng) {
  const std::size_t W = dist.size();
  const auto positive = static_cast<std::size_t>(std::count_if(dist.pmf.begin(), dist.pmf.end(), [](double p) { return p > 0.0; }));
  if (S > positive) {
    throw std::invalid_argument(fmt::format("cannot draw S = {} distinct tones; only {} of {} have mass", S, positive, W));
  }
  WeightTree tree(dist.pmf);
  std::vector<std::size_t> tones;
  tones.reserve(S);
  while (tones.size() < S) {
    const std::size_t w = tree.find(rng.uniform() * tree.total());
    // Roundoff can leave a removed slot with a tiny residue; such draws are repeated.
    if (tree.weight(w) <= 0.0) continue;
    tones.push_back(w);
    tree.remove(w);
  }
  return tones;
}

cplx random_phase(RngStream& rng) { return std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform()); }

void finalize_support(SparseSignal& s) {
  s.support.clear();
  s.amplitudes.clear();
  for (std::size_t w = 0; w < s.W; ++w) {
    if (s.alpha[w] != cplx{}) {
      s.support.push_back(w);
      s.amplitudes.push_back(s.alpha[w]);
    }
  }
}

}  // namespace

ToneDistribution ToneDistribution::uniform(std::size_t W) {
  if (W == 0) throw std::invalid_argument("ToneDistribution::uniform: W must be positive");
  return {RVector(W, 1.0 / static_cast<double>(W)), ToneProvenance::uniform, 0};
}

ToneDistribution ToneDistribution::custom(RVector weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("ToneDistribution: weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("ToneDistribution: all weights are zero");
  for (double& w : weights) w /= total;
  return {std::move(weights), ToneProvenance::custom, 0};
}

std::string ToneDistribution::name() const {
  switch (provenance) {
    case ToneProvenance::uniform:
      return "uniform";
    case ToneProvenance::matched:
      return "matched";
    case ToneProvenance::custom:
      return "custom";
  }
  return "custom";
}

ToneDistribution matched_distribution(const RVector& spectrum) {
  RVector w(spectrum.size());
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (spectrum[i] < 0.0) ++clipped;
    w[i] = std::max(spectrum[i], 0.0);
  }
  ToneDistribution d = ToneDistribution::custom(std::move(w));
  d.provenance = ToneProvenance::matched;
  d.clipped = clipped;
  return d;
}

long signed_tone(std::size_t w, std::size_t W) noexcept {
  return w <= W / 2 ? static_cast<long>(w) : static_cast<long>(w) - static_cast<long>(W);
}

SparseSignal gen_sparse_signal(std::size_t W, std::size_t S, const ToneDistribution& dist, RngStream& rng) {
  if (dist.size() != W) throw std::invalid_argument("gen_sparse_signal: distribution length differs from W");
  if (S > W) throw std::invalid_argument(fmt::format("gen_sparse_signal: S = {} exceeds W = {}", S, W));
  SparseSignal s;
  s.W = W;
  s.S = S;
  s.alpha.assign(W, cplx{});
  for (std::size_t w : draw_tones(S, dist, rng)) s.alpha[w] = random_phase(rng);
  finalize_support(s);
  return s;
}

double hamming_response(double delta, std::size_t W) {
  const auto dirichlet = [W](double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double n = static_cast<double>(W);
    return std::sin(std::numbers::pi * x) / (n * std::sin(std::numbers::pi * x / n));
  };
  return 0.54 * dirichlet(delta) + 0.23 * (dirichlet(delta - 1.0) + dirichlet(delta + 1.0));
}

SparseSignal gen_leaky_signal(std::size_t W, std::size_t S, const ToneDistribution& dist, RngStream& rng) {
  if (dist.size() != W) throw std::invalid_argument("gen_leaky_signal: distribution length differs from W");
  if (S * kLeakageBins > W) {
    throw std::invalid_argument(
        fmt::format("gen_leaky_signal: {} tones x {} bins overcrowd W = {}", S, kLeakageBins, W));
  }
  SparseSignal s;
  s.W = W;
  s.S = S;
  s.alpha.assign(W, cplx{});
  const auto tones = draw_tones(S, dist, rng);
  std::array<double, kLeakageBins> coeff{};
  for (std::size_t w : tones) {
    const double nu = static_cast<double>(w) + rng.uniform();
    s.frequencies.push_back(nu);
    const auto base = static_cast<long>(std::floor(nu)) - static_cast<long>(kLeakageBins / 2 - 1);
    double energy = 0.0;
    for (std::size_t b = 0; b < kLeakageBins; ++b) {
      coeff[b] = hamming_response(static_cast<double>(base + static_cast<long>(b)) - nu, W);
      energy += coeff[b] * coeff[b];
    }
    const cplx phase = random_phase(rng) / std::sqrt(energy);
    for (std::size_t b = 0; b < kLeakageBins; ++b) {
      const long idx = ((base + static_cast<long>(b)) % static_cast<long>(W) + static_cast<long>(W)) % static_cast<long>(W);
      s.alpha[static_cast<std::size_t>(idx)] += coeff[b] * phase;
    }
  }
  finalize_support(s);
  return s;
}

CVector add_noise(std::span<const cplx> y, double p, RngStream& rng) {
  if (!(p >= 0.0)) throw std::invalid_argument("add_noise: p must be >= 0");
  CVector out(y.begin(), y.end());
  if (p == 0.0) return out;
  const double sd = std::sqrt(p / 2.0);
  for (auto& v : out) {
    const double re = rng.normal();
    const double im = rng.normal();
    v += cplx(sd * re, sd * im);
  }
  return out;
}

double noise_power_for_snr(std::span<const cplx> y, double snr_db_value) {
  if (y.empty()) throw std::invalid_argument("noise_power_for_snr: empty measurement vector");
  double power = 0.0;
  for (const auto& v : y) power += std::norm(v);
  power /= static_cast<double>(y.size());
  return power / std::pow(10.0, snr_db_value / 10.0);
}

double snr_db(std::span<const cplx> y, double p) {
  if (y.empty() || !(p > 0.0)) throw std::invalid_argument("snr_db: need nonempty y and p > 0");
  double power = 0.0;
  for (const auto& v : y) power += std::norm(v);
  return 10.0 * std::log10(power / static_cast<double>(y.size()) / p);
}

std::string signal_csv(const SparseSignal& signal) {
  std::string out = "tone,re,im\n";
  for (std::size_t i = 0; i < signal.support.size(); ++i) {
    out += fmt::format("{},{:.17g},{:.17g}\n", signal.support[i], signal.amplitudes[i].real(), signal.amplitudes[i].imag());
  }
  return out;
}

}  // namespace crd
