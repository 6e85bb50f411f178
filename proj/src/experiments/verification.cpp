#include "crd/experiments/verification.hpp"

#include <algorithm>
#include <cmath>

#include "crd/demodulator/diagnostics.hpp"
#include "crd/demodulator/sensing_operator.hpp"
#include "crd/numerics/parallel.hpp"

namespace crd {

namespace {
constexpr std::size_t kGramChunk = 50;
}

EntryBoundResult entry_bound_check(const SequenceSource& source, std::size_t W, std::size_t R, std::size_t mdd,
                          std::size_t trials, const RngStream& rng, unsigned threads) {
  EntryBoundResult out;
  out.threshold = componentwise_bound(mdd, W, R);
  RVector entries(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    RngStream s = rng.split(t);
    const DemodulatorModel model(W, R, source.draw(W, s));
    entries[t] = max_entry(build_explicit(model));
  });
  std::size_t violations = 0;
  for (double e : entries) {
    violations += e > out.threshold ? 1 : 0;
    out.max_entry_mean += e;
    out.max_entry_max = std::max(out.max_entry_max, e);
  }
  if (trials > 0) {
    out.violation_fraction = static_cast<double>(violations) / static_cast<double>(trials);
    out.max_entry_mean /= static_cast<double>(trials);
  }
  return out;
}

GramResult gram_expectation_check(const SequenceSource& source, const DeltaMatrix& delta, std::size_t draws,
                                  const RngStream& rng, unsigned threads) {
  const std::size_t W = delta.W;
  const std::size_t R = delta.R;
  const std::size_t chunks = (draws + kGramChunk - 1) / kGramChunk;
  std::vector<CMatrix> sums(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    CMatrix acc(W, W);
    const std::size_t end = std::min(draws, (c + 1) * kGramChunk);
    for (std::size_t t = c * kGramChunk; t < end; ++t) {
      RngStream s = rng.split(t);
      const CMatrix phi = build_explicit(DemodulatorModel(W, R, source.draw(W, s)));
      for (std::size_t r = 0; r < R; ++r) {
        const auto row = phi.row(r);
        for (std::size_t a = 0; a < W; ++a) {
          const cplx ca = std::conj(row[a]);
          for (std::size_t w = 0; w < W; ++w) acc(a, w) += ca * row[w];
        }
      }
    }
    sums[c] = std::move(acc);
  });
  CMatrix mean(W, W);
  for (const auto& s : sums) {
    for (std::size_t i = 0; i < W * W; ++i) mean.data()[i] += s.data()[i];
  }
  GramResult out;
  out.draws = draws;
  out.tolerance = 5.0 / std::sqrt(static_cast<double>(draws));
  for (std::size_t a = 0; a < W; ++a) {
    for (std::size_t w = 0; w < W; ++w) {
      const cplx m = mean(a, w) / static_cast<double>(draws);
      const cplx ident = a == w ? cplx(1.0) : cplx{};
      out.max_deviation = std::max(out.max_deviation, std::abs(m - ident - delta.entries(a, w)));
      out.max_deviation_from_identity = std::max(out.max_deviation_from_identity, std::abs(m - ident));
    }
  }
  return out;
}

double IndependenceResult::max_deviation() const {
  return std::max(std::abs(p_plus_given_plus - 0.5), std::abs(p_plus_given_minus - 0.5));
}

IndependenceResult independence_check(const SequenceSource& source, std::size_t separation, std::size_t samples,
                                      RngStream rng) {
  IndependenceResult out;
  out.separation = separation;
  out.samples = samples;
  std::size_t length = samples + separation;
  // RCS sequences must have whole blocks.
  if (source.family.kind == FamilyKind::rcs) {
    const auto period = static_cast<std::size_t>(source.family.d) + 1;
    length = (length + period - 1) / period * period;
  }
  const BipolarSequence seq = source.draw(length, rng);
  std::size_t n_plus = 0, n_minus = 0, plus_plus = 0, minus_plus = 0;
  for (std::size_t j = 0; j < samples; ++j) {
    const bool next_plus = seq.chips[j + separation] > 0;
    if (seq.chips[j] > 0) {
      ++n_plus;
      plus_plus += next_plus ? 1 : 0;
    } else {
      ++n_minus;
      minus_plus += next_plus ? 1 : 0;
    }
  }
  out.p_plus_given_plus = n_plus ? static_cast<double>(plus_plus) / static_cast<double>(n_plus) : 0.0;
  out.p_plus_given_minus = n_minus ? static_cast<double>(minus_plus) / static_cast<double>(n_minus) : 0.0;
  return out;
}

}  // namespace crd
