#include "crd/sequences/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace crd {

namespace {

constexpr std::size_t kMaxLags = 100000;

// Drops every lag after the last one with |R(m)| >= cut, keeping at least R(0).
RVector cut_tail(RVector r, double cut) {
  std::size_t keep = 1;
  for (std::size_t m = 0; m < r.size(); ++m) {
    if (std::abs(r[m]) >= cut) keep = m + 1;
  }
  r.resize(keep);
  return r;
}

}  // namespace

CorrelationModel CorrelationModel::stationary(RVector autocorr) {
  if (autocorr.empty()) throw std::invalid_argument("CorrelationModel: empty autocorrelation");
  CorrelationModel model;
  model.period = 1;
  model.lags.push_back(std::move(autocorr));
  return model;
}

CorrelationModel CorrelationModel::rcs(int d) {
  if (d < 0) throw std::invalid_argument("CorrelationModel::rcs: d must be >= 0");
  const auto period = static_cast<std::size_t>(d) + 1;
  CorrelationModel model;
  model.period = period;
  model.lags.assign(period, RVector(period, 0.0));
  for (std::size_t p = 0; p < period; ++p) {
    for (std::size_t m = 0; p + m < period; ++m) model.lags[p][m] = 1.0;
  }
  return model;
}

double CorrelationModel::corr(std::size_t j, std::size_t k) const noexcept {
  const std::size_t lo = std::min(j, k);
  const std::size_t m = std::max(j, k) - lo;
  const RVector& row = lags[lo % period];
  return m < row.size() ? row[m] : 0.0;
}

RVector CorrelationModel::cyclo_average() const {
  RVector avg(length(), 0.0);
  for (const auto& row : lags) {
    for (std::size_t m = 0; m < row.size(); ++m) avg[m] += row[m];
  }
  for (auto& v : avg) v /= static_cast<double>(period);
  return avg;
}

RVector analytic_autocorrelation(const MarkovChain& chain, std::size_t m_max) {
  const std::size_t n = chain.num_states();
  const auto& p = chain.transition();
  const auto& a = chain.weighted_output();
  RVector v = chain.output();  // P^m b
  RVector next(n);
  RVector r(m_max + 1);
  for (std::size_t m = 0; m <= m_max; ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * v[i];
    r[m] = s;
    if (m == m_max) break;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += p[i * n + j] * v[j];
      next[i] = acc;
    }
    v.swap(next);
  }
  return r;
}

RVector truncated_autocorrelation(const SequenceFamily& family, const MarkovChain* chain, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("truncated_autocorrelation: xi must be positive");
  switch (family.kind) {
    case FamilyKind::rademacher:
      return {1.0};
    case FamilyKind::rcs:
      return CorrelationModel::rcs(family.d).cyclo_average();
    case FamilyKind::mrs: {
      if (chain == nullptr) throw std::invalid_argument("truncated_autocorrelation: MRS family needs a chain");
      // Compute well past the point where the lambda2 envelope drops below xi / 100.
      const double l2 = std::clamp(chain->lambda2(), 1e-3, 1.0 - 1e-9);
      const double horizon = 2.0 * std::log(xi / 100.0) / std::log(l2);
      const auto m_max = static_cast<std::size_t>(std::clamp(horizon, 64.0, static_cast<double>(kMaxLags)));
      return cut_tail(analytic_autocorrelation(*chain, m_max), xi / 10.0);
    }
  }
  throw std::invalid_argument("truncated_autocorrelation: unknown family");
}

CorrelationModel correlation_model(const SequenceFamily& family, const MarkovChain* chain, double xi) {
  if (family.kind == FamilyKind::rcs) return CorrelationModel::rcs(family.d);
  return CorrelationModel::stationary(truncated_autocorrelation(family, chain, xi));
}

RVector power_spectrum(const RVector& autocorr, std::size_t W) {
  if (autocorr.empty()) throw std::invalid_argument("power_spectrum: empty autocorrelation");
  if (W == 0) throw std::invalid_argument("power_spectrum: W must be positive");
  RVector f(W, autocorr[0]);
  for (std::size_t w = 0; w < W; ++w) {
    double s = 0.0;
    for (std::size_t m = 1; m < autocorr.size(); ++m) {
      // m * w reduced mod W keeps the angle exact for large lags.
      const std::size_t t = (m % W) * w % W;
      s += autocorr[m] * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(W));
    }
    f[w] += 2.0 * s;
  }
  return f;
}

RVector reduced_spectrum(const RVector& spectrum) {
  RVector r(spectrum);
  for (auto& v : r) v -= 1.0;
  return r;
}

std::size_t mdd(const RVector& autocorr, double xi, bool exact_tail) {
  if (!(xi > 0.0)) throw std::invalid_argument("mdd: xi must be positive");
  if (autocorr.empty()) throw std::invalid_argument("mdd: empty autocorrelation");
  if (!exact_tail && std::abs(autocorr.back()) >= xi) {
    throw std::runtime_error(
        fmt::format("mdd: |R({})| = {:.3g} is still >= xi = {:.3g}; compute more lags", autocorr.size() - 1,
                    std::abs(autocorr.back()), xi));
  }
  std::size_t l = autocorr.size();
  while (l > 1 && std::abs(autocorr[l - 1]) < xi) --l;
  return l;
}

double gamma_norm_bound(double lambda2) {
  if (!(lambda2 >= 0.0) || lambda2 >= 1.0) {
    throw std::invalid_argument(fmt::format("gamma_norm_bound: lambda2 = {} is outside [0, 1)", lambda2));
  }
  return 1.0 / (std::numbers::sqrt2 * (1.0 - std::sqrt(lambda2)));
}

double analytic_transition_density(const MarkovChain& chain) {
  const std::size_t per = chain.states_per_polarity();
  const auto& pi = chain.stationary();
  const auto& sw = chain.switch_probabilities();
  double s = 0.0;
  for (std::size_t i = 0; i < chain.num_states(); ++i) s += pi[i] * sw[i % per];
  return s;
}

double SequenceStats::max_reduced() const {
  double m = 0.0;
  for (double v : reduced_spectrum) m = std::max(m, std::abs(v));
  return m;
}

std::size_t SequenceStats::argmax_reduced() const {
  std::size_t best = 0;
  for (std::size_t w = 1; w < reduced_spectrum.size(); ++w) {
    if (std::abs(reduced_spectrum[w]) > std::abs(reduced_spectrum[best])) best = w;
  }
  return best;
}

SequenceStats compute_stats(const SequenceFamily& family, std::size_t W, const MarkovChain* chain, double xi) {
  SequenceStats st;
  st.xi = xi;
  st.autocorr = truncated_autocorrelation(family, chain, xi);
  st.mdd = mdd(st.autocorr, xi);
  st.spectrum = power_spectrum(st.autocorr, W);
  st.reduced_spectrum = reduced_spectrum(st.spectrum);
  switch (family.kind) {
    case FamilyKind::rademacher:
      st.transition_density = 0.5;
      break;
    case FamilyKind::rcs:
      st.transition_density = 0.5 / static_cast<double>(family.d + 1);
      break;
    case FamilyKind::mrs:
      st.gamma_norm_bound = gamma_norm_bound(chain->lambda2());
      st.transition_density = analytic_transition_density(*chain);
      break;
  }
  return st;
}

std::string series_csv(const RVector& values) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out += fmt::format("{},{:.17g}\n", i, values[i]);
  return out;
}

std::string sequence_csv(const BipolarSequence& seq) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < seq.size(); ++i) out += fmt::format("{},{}\n", i, static_cast<int>(seq.chips[i]));
  return out;
}

}  // namespace crd
