#include "crd/sequences/sequence.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace crd {

std::string SequenceFamily::label() const {
  switch (kind) {
    case FamilyKind::rademacher:
      return "rademacher";
    case FamilyKind::rcs:
      return fmt::format("rcs({})", d);
    case FamilyKind::mrs:
      return k == kUnboundedK ? fmt::format("mrs({},inf)", d) : fmt::format("mrs({},{})", d, k);
  }
  return "unknown";
}

std::string SequenceFamily::kind_name() const {
  switch (kind) {
    case FamilyKind::rademacher:
      return "rademacher";
    case FamilyKind::rcs:
      return "rcs";
    case FamilyKind::mrs:
      return "mrs";
  }
  return "unknown";
}

std::vector<double> BipolarSequence::as_doubles() const {
  std::vector<double> out(chips.size());
  for (std::size_t i = 0; i < chips.size(); ++i) out[i] = chips[i];
  return out;
}

BipolarSequence gen_rademacher(std::size_t length, RngStream& rng) {
  if (length == 0) throw std::invalid_argument("gen_rademacher: length must be >= 1");
  BipolarSequence seq{std::vector<std::int8_t>(length), SequenceFamily::rademacher()};
  for (auto& c : seq.chips) c = static_cast<std::int8_t>(rng.sign());
  return seq;
}

BipolarSequence gen_rcs(std::size_t length, int d, RngStream& rng) {
  if (d < 0) throw std::invalid_argument("gen_rcs: d must be >= 0");
  const auto period = static_cast<std::size_t>(d) + 1;
  if (length == 0 || length % period != 0) {
    throw std::invalid_argument(fmt::format("gen_rcs: d+1 = {} must divide the length {}", period, length));
  }
  BipolarSequence seq{std::vector<std::int8_t>(length), SequenceFamily::rcs(d)};
  for (std::size_t block = 0; block < length / period; ++block) {
    const auto s = static_cast<std::int8_t>(rng.sign());
    for (std::size_t i = 0; i < period; ++i) seq.chips[block * period + i] = s;
  }
  return seq;
}

BipolarSequence gen_mrs(std::size_t length, const MarkovChain& chain, RngStream& rng) {
  if (length == 0) throw std::invalid_argument("gen_mrs: length must be >= 1");
  const std::size_t per = chain.states_per_polarity();
  const auto& pi = chain.stationary();
  const auto& sw = chain.switch_probabilities();

  double u = rng.uniform();
  std::size_t state = 0;
  for (; state + 1 < pi.size(); ++state) {
    if (u < pi[state]) break;
    u -= pi[state];
  }

  SequenceFamily fam = SequenceFamily::mrs(chain.d(), chain.unbounded() ? kUnboundedK : chain.k());
  BipolarSequence seq{std::vector<std::int8_t>(length), fam};
  for (std::size_t t = 0; t < length; ++t) {
    const bool top = state < per;
    const std::size_t pos = top ? state : state - per;
    seq.chips[t] = top ? 1 : -1;
    if (rng.uniform() < sw[pos]) {
      state = top ? per : 0;
    } else {
      state = state + 1;
    }
  }
  return seq;
}

BipolarSequence generate(const SequenceFamily& family, std::size_t length, RngStream& rng, const MarkovChain* chain) {
  switch (family.kind) {
    case FamilyKind::rademacher:
      return gen_rademacher(length, rng);
    case FamilyKind::rcs:
      return gen_rcs(length, family.d, rng);
    case FamilyKind::mrs:
      if (chain == nullptr) throw std::invalid_argument("generate: MRS family needs a Markov chain");
      return gen_mrs(length, *chain, rng);
  }
  throw std::invalid_argument("generate: unknown family");
}

SequenceSource SequenceSource::make(const SequenceFamily& family) {
  SequenceSource src{family, std::nullopt};
  if (family.kind == FamilyKind::mrs) src.chain = build_mrs_chain(family.d, family.k);
  return src;
}

SequenceSource SequenceSource::with_chain(MarkovChain chain) {
  const SequenceFamily fam = SequenceFamily::mrs(chain.d(), chain.unbounded() ? kUnboundedK : chain.k());
  return {fam, std::move(chain)};
}

std::vector<std::size_t> run_lengths(const BipolarSequence& seq) {
  std::vector<std::size_t> runs;
  std::size_t current = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0 && seq.chips[i] != seq.chips[i - 1]) {
      runs.push_back(current);
      current = 0;
    }
    ++current;
  }
  if (current > 0) runs.push_back(current);
  return runs;
}

double empirical_transition_density(const BipolarSequence& seq) {
  if (seq.size() < 2) return 0.0;
  std::size_t flips = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) flips += seq.chips[i] != seq.chips[i - 1] ? 1 : 0;
  return static_cast<double>(flips) / static_cast<double>(seq.size() - 1);
}

std::vector<double> empirical_autocorrelation(const BipolarSequence& seq, std::size_t max_lag) {
  std::vector<double> r(max_lag + 1, 0.0);
  const std::size_t n = seq.size();
  for (std::size_t m = 0; m <= max_lag && m < n; ++m) {
    long long acc = 0;
    for (std::size_t j = 0; j + m < n; ++j) acc += seq.chips[j] * seq.chips[j + m];
    r[m] = static_cast<double>(acc) / static_cast<double>(n - m);
  }
  return r;
}

}  // namespace crd
