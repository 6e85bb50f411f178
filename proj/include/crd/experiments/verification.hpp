#pragma once

#include <cstddef>

#include "crd/demodulator/delta.hpp"
#include "crd/numerics/rng.hpp"
#include "crd/sequences/sequence.hpp"

namespace crd {

struct EntryBoundResult {
  double threshold = 0.0;        ///< sqrt(10 l ln W / R)
  double violation_fraction = 0.0;
  double max_entry_mean = 0.0;
  double max_entry_max = 0.0;
};

/// Fraction of draws whose ||Phi||_max exceeds the componentwise bound for MDD `mdd`.
EntryBoundResult entry_bound_check(const SequenceSource& source, std::size_t W, std::size_t R, std::size_t mdd,
                          std::size_t trials, const RngStream& rng, unsigned threads = 0);

struct GramResult {
  double max_deviation = 0.0;  ///< max |mean(Phi^* Phi) - I - Delta|
  double max_deviation_from_identity = 0.0;  ///< max |mean(Phi^* Phi) - I|
  double tolerance = 0.0;      ///< 5 / sqrt(N)
  std::size_t draws = 0;
};

/// Monte-Carlo mean of Phi^* Phi over N sequence draws against I + Delta. Draws are summed
/// in fixed chunks so the result does not depend on the thread count.
GramResult gram_expectation_check(const SequenceSource& source, const DeltaMatrix& delta, std::size_t draws,
                                  const RngStream& rng, unsigned threads = 0);

struct IndependenceResult {
  std::size_t separation = 0;
  double p_plus_given_plus = 0.0;
  double p_plus_given_minus = 0.0;
  std::size_t samples = 0;
  [[nodiscard]] double max_deviation() const;
};

/// Estimates P(eps_{j+sep} = +1 | eps_j = +-1) from `samples` pairs of one long draw.
IndependenceResult independence_check(const SequenceSource& source, std::size_t separation, std::size_t samples,
                                      RngStream rng);

}  // namespace crd
