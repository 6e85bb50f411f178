#include "crd/sequences/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace crd {

namespace {

void check_dk(int d, int k) {
  if (d < 1) throw std::invalid_argument(fmt::format("mrs chain: d must be >= 1 (got {})", d));
  if (k != kUnboundedK && d >= k) throw std::invalid_argument(fmt::format("mrs chain: need d < k (got d={}, k={})", d, k));
  if (k == kUnboundedK && d >= kUnboundedKCap) {
    throw std::invalid_argument(fmt::format("mrs chain: d={} exceeds the unbounded-k cap {}", d, kUnboundedKCap));
  }
}

}  // namespace

MarkovChain::MarkovChain(int d, int k, bool unbounded, ChainWeighting weighting, std::vector<double> switch_prob)
    : d_(d), k_(k), unbounded_(unbounded), weighting_(weighting), switch_(std::move(switch_prob)) {}

MarkovChain MarkovChain::maxentropic(int d, int k) {
  check_dk(d, k);
  const bool unbounded = k == kUnboundedK;
  const int kk = unbounded ? kUnboundedKCap : k;
  const std::size_t per = static_cast<std::size_t>(kk) + 1;
  const std::size_t n = 2 * per;

  // Adjacency of the (d,k) run-length graph.
  std::vector<double> adj(n * n, 0.0);
  for (std::size_t half = 0; half < 2; ++half) {
    const std::size_t own = half * per;
    const std::size_t other = (1 - half) * per;
    for (std::size_t i = 0; i < per; ++i) {
      if (i + 1 < per) adj[(own + i) * n + own + i + 1] = 1.0;
      if (i >= static_cast<std::size_t>(d)) adj[(own + i) * n + other] = 1.0;
    }
  }

  // Perron root and right eigenvector by power iteration (the graph is primitive).
  std::vector<double> v(n, 1.0), next(n);
  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += adj[i * n + j] * v[j];
      next[i] = s;
    }
    const double nrm = *std::max_element(next.begin(), next.end());
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= nrm;
      change = std::max(change, std::abs(next[i] - v[i]));
    }
    v.swap(next);
    lambda = nrm;
    if (change < 1e-14) break;
  }

  std::vector<double> sw(per, 0.0);
  for (std::size_t i = 0; i < per; ++i) {
    if (i >= static_cast<std::size_t>(d)) sw[i] = v[per] / (lambda * v[i]);
  }
  sw[per - 1] = 1.0;
  MarkovChain chain(d, kk, unbounded, ChainWeighting::maxentropic, std::move(sw));
  chain.perron_ = lambda;
  chain.finalize();
  return chain;
}

MarkovChain MarkovChain::with_switch_probabilities(int d, int k, const std::vector<double>& switch_prob) {
  check_dk(d, k);
  const bool unbounded = k == kUnboundedK;
  const int kk = unbounded ? kUnboundedKCap : k;
  const std::size_t optional = static_cast<std::size_t>(kk - d);
  if (switch_prob.size() != optional) {
    throw std::invalid_argument(fmt::format("mrs chain: expected {} switch probabilities for states d..k-1, got {}",
                                            optional, switch_prob.size()));
  }
  const std::size_t per = static_cast<std::size_t>(kk) + 1;
  std::vector<double> sw(per, 0.0);
  for (std::size_t i = 0; i < optional; ++i) {
    const double q = switch_prob[i];
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument(fmt::format("mrs chain: switch probability {} not in [0,1]", q));
    sw[static_cast<std::size_t>(d) + i] = q;
  }
  sw[per - 1] = 1.0;
  MarkovChain chain(d, kk, unbounded, ChainWeighting::custom, std::move(sw));
  chain.finalize();
  return chain;
}

void MarkovChain::finalize() {
  const std::size_t per = states_per_polarity();
  const std::size_t n = num_states();
  p_.assign(n * n, 0.0);
  b_.assign(n, 0.0);
  for (std::size_t half = 0; half < 2; ++half) {
    const std::size_t own = half * per;
    const std::size_t other = (1 - half) * per;
    for (std::size_t i = 0; i < per; ++i) {
      const double q = switch_[i];
      p_[(own + i) * n + other] += q;
      if (i + 1 < per) p_[(own + i) * n + own + i + 1] += 1.0 - q;
      b_[own + i] = half == 0 ? 1.0 : -1.0;
    }
  }

  // Stationary distribution: lazy power iteration pi <- (pi + P^T pi) / 2, immune to periodicity.
  pi_.assign(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (int it = 0; it < 200000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += pi_[i] * p_[i * n + j];
    double change = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] = 0.5 * (next[j] + pi_[j]);
      total += next[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= total;
      change += std::abs(next[j] - pi_[j]);
    }
    pi_.swap(next);
    if (change < 1e-14) break;
  }

  a_.resize(n);
  for (std::size_t i = 0; i < n; ++i) a_[i] = b_[i] * pi_[i];
  lambda2_ = second_eigenvalue_modulus(p_, pi_, n);
}

double second_eigenvalue_modulus(const std::vector<double>& p, const std::vector<double>& pi, std::size_t n) {
  if (n < 2) return 0.0;
  // Two-column block iteration on Q = P - 1 pi^T; the Ritz values of the 2x2 projection
  // capture a complex-conjugate dominant pair as well as a real one.
  std::vector<double> x0(n), x1(n), y0(n), y1(n);
  for (std::size_t i = 0; i < n; ++i) {
    x0[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
    x1[i] = std::cos(2.0 + 1.3 * static_cast<double>(i * i % 17));
  }
  auto apply_q = [&](const std::vector<double>& in, std::vector<double>& out) {
    double proj = 0.0;
    for (std::size_t j = 0; j < n; ++j) proj += pi[j] * in[j];
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += p[i * n + j] * in[j];
      out[i] = s - proj;
    }
  };
  auto orthonormalize = [&](std::vector<double>& a, std::vector<double>& b) -> bool {
    double na = 0.0;
    for (double v : a) na += v * v;
    na = std::sqrt(na);
    if (na == 0.0) return false;
    for (double& v : a) v /= na;
    for (int pass = 0; pass < 2; ++pass) {
      double dotab = 0.0;
      for (std::size_t i = 0; i < n; ++i) dotab += a[i] * b[i];
      for (std::size_t i = 0; i < n; ++i) b[i] -= dotab * a[i];
    }
    double nb = 0.0;
    for (double v : b) nb += v * v;
    nb = std::sqrt(nb);
    if (nb == 0.0) return false;
    for (double& v : b) v /= nb;
    return true;
  };
  if (!orthonormalize(x0, x1)) return 0.0;

  double estimate = 0.0;
  int stable = 0;
  for (int it = 0; it < 200000; ++it) {
    apply_q(x0, y0);
    apply_q(x1, y1);
    // Ritz matrix H = X^T Q X
    double h00 = 0.0, h01 = 0.0, h10 = 0.0, h11 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h00 += x0[i] * y0[i];
      h01 += x0[i] * y1[i];
      h10 += x1[i] * y0[i];
      h11 += x1[i] * y1[i];
    }
    const double tr = h00 + h11;
    const double det = h00 * h11 - h01 * h10;
    const double disc = 0.25 * tr * tr - det;
    double modulus = 0.0;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      modulus = std::max(std::abs(0.5 * tr + s), std::abs(0.5 * tr - s));
    } else {
      modulus = std::sqrt(std::max(det, 0.0));
    }
    if (std::abs(modulus - estimate) <= 1e-14 * std::max(1.0, modulus)) {
      if (++stable >= 25) return modulus;
    } else {
      stable = 0;
    }
    estimate = modulus;
    x0.swap(y0);
    x1.swap(y1);
    if (!orthonormalize(x0, x1)) return estimate;
  }
  return estimate;
}

std::string MarkovChain::report() const {
  std::ostringstream os;
  const std::size_t n = num_states();
  os << fmt::format("MRS chain (d={}, k={}{}), weighting={}\n", d_, unbounded_ ? std::string("inf") : std::to_string(k_),
                    unbounded_ ? fmt::format(" capped at {}", k_) : std::string(),
                    weighting_ == ChainWeighting::maxentropic ? "maxentropic" : "custom");
  os << fmt::format("states: {} ({} per polarity; state i emits run chip i+1)\n", n, states_per_polarity());
  if (perron_ > 0.0) os << fmt::format("perron root: {:.15g} (capacity {:.6f} bits)\n", perron_, std::log2(perron_));
  os << fmt::format("lambda2: {:.15g}\n", lambda2_);
  os << "switch probabilities (top half):";
  for (double q : switch_) os << fmt::format(" {:.6f}", q);
  os << "\nstationary pi:";
  for (double v : pi_) os << fmt::format(" {:.6e}", v);
  os << "\nP (nonzero entries):\n";
  for (std::size_t i = 0; i < n; ++i) {
    os << fmt::format("  {:3d}:", i);
    for (std::size_t j = 0; j < n; ++j) {
      if (p(i, j) != 0.0) os << fmt::format(" ->{}:{:.6f}", j, p(i, j));
    }
    os << '\n';
  }
  return os.str();
}

MarkovChain build_mrs_chain(int d, int k, ChainWeighting weighting, const std::vector<double>& switch_prob) {
  if (weighting == ChainWeighting::maxentropic) return MarkovChain::maxentropic(d, k);
  return MarkovChain::with_switch_probabilities(d, k, switch_prob);
}

}  // namespace crd
