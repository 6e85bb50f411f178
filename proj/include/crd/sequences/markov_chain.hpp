#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace crd {

/// Sentinel for k = "unbounded"; such chains are capped at kUnboundedKCap.
inline constexpr int kUnboundedK = -1;
inline constexpr int kUnboundedKCap = 64;

enum class ChainWeighting { maxentropic, custom };

/// Run-length-limited Markov chain emitting +-1 chips.
///
/// Each polarity owns k+1 states; state i of a polarity (0-based) means the current run
/// has emitted i+1 chips. Runs therefore have length in [d+1, k+1]: states below d are
/// forced forward, the last state is forced to switch, and in between the chain continues
/// or switches with a per-state probability. Switching enters state 0 of the other
/// polarity, so P satisfies p_{(i+K)(j+K)} = p_ij with K = k+1 (indices mod 2K).
class MarkovChain {
 public:
  /// Maxentropic chain of the (d,k) constraint graph: p_ij = A_ij v_j / (lambda v_i).
  static MarkovChain maxentropic(int d, int k);
  /// Chain with user-supplied switch probabilities for the optional states d..k-1
  /// (k - d values, each in [0, 1]).
  static MarkovChain with_switch_probabilities(int d, int k, const std::vector<double>& switch_prob);

  [[nodiscard]] int d() const noexcept { return d_; }
  /// Effective k (the cap when the requested k was unbounded).
  [[nodiscard]] int k() const noexcept { return k_; }
  [[nodiscard]] bool unbounded() const noexcept { return unbounded_; }
  [[nodiscard]] ChainWeighting weighting() const noexcept { return weighting_; }
  [[nodiscard]] std::size_t states_per_polarity() const noexcept { return static_cast<std::size_t>(k_) + 1; }
  [[nodiscard]] std::size_t num_states() const noexcept { return 2 * states_per_polarity(); }

  /// Row-major n x n transition matrix.
  [[nodiscard]] const std::vector<double>& transition() const noexcept { return p_; }
  [[nodiscard]] double p(std::size_t i, std::size_t j) const noexcept { return p_[i * num_states() + j]; }
  [[nodiscard]] const std::vector<double>& output() const noexcept { return b_; }
  [[nodiscard]] const std::vector<double>& stationary() const noexcept { return pi_; }
  /// a = diag(pi) b
  [[nodiscard]] const std::vector<double>& weighted_output() const noexcept { return a_; }
  /// Second-largest eigenvalue modulus of P.
  [[nodiscard]] double lambda2() const noexcept { return lambda2_; }
  /// Perron eigenvalue of the constraint graph (maxentropic chains; 0 otherwise).
  [[nodiscard]] double perron_root() const noexcept { return perron_; }
  /// Switch probability out of each top-half state.
  [[nodiscard]] const std::vector<double>& switch_probabilities() const noexcept { return switch_; }

  /// Human-readable dump: parameters, P, pi, lambda2.
  [[nodiscard]] std::string report() const;

 private:
  MarkovChain(int d, int k, bool unbounded, ChainWeighting weighting, std::vector<double> switch_prob);
  void finalize();

  int d_;
  int k_;
  bool unbounded_;
  ChainWeighting weighting_;
  std::vector<double> switch_;
  std::vector<double> p_;
  std::vector<double> b_;
  std::vector<double> pi_;
  std::vector<double> a_;
  double lambda2_ = 0.0;
  double perron_ = 0.0;
};

/// (d, k) validation and "unbounded" capping shared by all constructors.
MarkovChain build_mrs_chain(int d, int k, ChainWeighting weighting = ChainWeighting::maxentropic,
                            const std::vector<double>& switch_prob = {});

/// Second-largest eigenvalue modulus of a row-stochastic matrix with stationary
/// distribution pi, by two-dimensional subspace iteration on P - 1 pi^T.
double second_eigenvalue_modulus(const std::vector<double>& p, const std::vector<double>& pi, std::size_t n);

}  // namespace crd
