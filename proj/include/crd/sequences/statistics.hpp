#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crd/numerics/types.hpp"
#include "crd/sequences/markov_chain.hpp"
#include "crd/sequences/sequence.hpp"

namespace crd {

inline constexpr double kDefaultXi = 1e-3;

/// Second-order statistics E[eps_j eps_k] of a (cyclo)stationary bipolar sequence.
///
/// lags[p][m] = E[eps_j eps_{j+m}] for any j with j mod period == p. Stationary families
/// have period 1; RCS(d) has period d+1. Entries beyond the stored lags are zero.
struct CorrelationModel {
  std::size_t period = 1;
  std::vector<RVector> lags;

  /// Stationary model from R(0..L).
  static CorrelationModel stationary(RVector autocorr);
  /// Exact RCS(d) model: chips in the same block are equal, other pairs independent.
  static CorrelationModel rcs(int d);

  /// Number of stored lags (the MDD when truncated at the threshold).
  [[nodiscard]] std::size_t length() const noexcept { return lags.empty() ? 0 : lags.front().size(); }
  /// E[eps_j eps_k]
  [[nodiscard]] double corr(std::size_t j, std::size_t k) const noexcept;
  /// R(m) averaged over the cycle phases.
  [[nodiscard]] RVector cyclo_average() const;
};

/// R(m) = a^T P^m b for m = 0..m_max.
RVector analytic_autocorrelation(const MarkovChain& chain, std::size_t m_max);

/// Analytic autocorrelation cut after the last lag with |R(m)| >= xi / 10.
/// Rademacher gives {1}; RCS(d) gives the cyclo-averaged 1 - m/(d+1).
RVector truncated_autocorrelation(const SequenceFamily& family, const MarkovChain* chain, double xi = kDefaultXi);

/// Correlation model of a family with the same truncation as truncated_autocorrelation.
CorrelationModel correlation_model(const SequenceFamily& family, const MarkovChain* chain, double xi = kDefaultXi);

/// F(w) = sum_m R(m) exp(-2 pi i m w / W) over the W integral tones, with R(-m) = R(m)
/// folded so the result is real: F(w) = R(0) + 2 sum_{m>=1} R(m) cos(2 pi m w / W).
RVector power_spectrum(const RVector& autocorr, std::size_t W);
/// F - 1
RVector reduced_spectrum(const RVector& spectrum);

/// Smallest l with |R(m)| < xi for all m >= l. With exact_tail the lags past the end are
/// zero; otherwise the input is a prefix of a longer sequence and a last lag still >= xi
/// throws, since the tail is then unknown.
std::size_t mdd(const RVector& autocorr, double xi = kDefaultXi, bool exact_tail = true);

/// 1 / (sqrt(2) (1 - sqrt(lambda2))); throws unless lambda2 is in [0, 1).
double gamma_norm_bound(double lambda2);

/// sum_i pi_i * P(polarity switch | state i)
double analytic_transition_density(const MarkovChain& chain);

struct SequenceStats {
  RVector autocorr;
  std::size_t mdd = 0;
  double xi = kDefaultXi;
  RVector spectrum;
  RVector reduced_spectrum;
  double gamma_norm_bound = 0.0;  ///< 0 for families without a Markov chain
  double transition_density = 0.0;

  /// max_w |F~(w)| and the first tone attaining it
  [[nodiscard]] double max_reduced() const;
  [[nodiscard]] std::size_t argmax_reduced() const;
};

/// Analytic statistics of a family on W tones.
SequenceStats compute_stats(const SequenceFamily& family, std::size_t W, const MarkovChain* chain,
                            double xi = kDefaultXi);

/// "index,value" CSV text, one row per entry.
std::string series_csv(const RVector& values);
std::string sequence_csv(const BipolarSequence& seq);

}  // namespace crd
