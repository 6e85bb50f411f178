#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crd/numerics/rng.hpp"
#include "crd/sequences/markov_chain.hpp"

namespace crd {

enum class FamilyKind { rademacher, rcs, mrs };

/// Modulating-sequence family with its run-length parameters.
struct SequenceFamily {
  FamilyKind kind = FamilyKind::rademacher;
  int d = 0;  ///< repeats (rcs) or minimum extra run length (mrs)
  int k = 0;  ///< maximum extra run length (mrs); kUnboundedK means "infinity"

  static SequenceFamily rademacher() { return {}; }
  static SequenceFamily rcs(int d) { return {FamilyKind::rcs, d, 0}; }
  static SequenceFamily mrs(int d, int k) { return {FamilyKind::mrs, d, k}; }

  /// "rademacher", "rcs(1)", "mrs(1,20)"
  [[nodiscard]] std::string label() const;
  /// "rademacher" | "rcs" | "mrs"
  [[nodiscard]] std::string kind_name() const;

  friend bool operator==(const SequenceFamily&, const SequenceFamily&) = default;
};

/// Length-W vector of +-1 chips.
struct BipolarSequence {
  std::vector<std::int8_t> chips;
  SequenceFamily family;

  [[nodiscard]] std::size_t size() const noexcept { return chips.size(); }
  /// Chips as +-1.0 doubles, the layout consumed by the modulation kernels.
  [[nodiscard]] std::vector<double> as_doubles() const;
};

BipolarSequence gen_rademacher(std::size_t length, RngStream& rng);
/// Rademacher block signs, each held for d+1 chips; (d+1) must divide the length.
BipolarSequence gen_rcs(std::size_t length, int d, RngStream& rng);
/// Sample path of the run-length-limited chain, started from its stationary distribution.
BipolarSequence gen_mrs(std::size_t length, const MarkovChain& chain, RngStream& rng);

/// Generates one sequence of the given family; the MRS chain must match the family.
BipolarSequence generate(const SequenceFamily& family, std::size_t length, RngStream& rng,
                         const MarkovChain* chain = nullptr);

/// A family together with the chain it needs, ready to draw independent sequences.
struct SequenceSource {
  SequenceFamily family;
  std::optional<MarkovChain> chain;

  /// Builds the maxentropic chain for MRS families.
  static SequenceSource make(const SequenceFamily& family);
  /// MRS source with an explicit chain (for custom switch probabilities).
  static SequenceSource with_chain(MarkovChain chain);

  [[nodiscard]] const MarkovChain* chain_ptr() const noexcept { return chain ? &*chain : nullptr; }
  [[nodiscard]] BipolarSequence draw(std::size_t length, RngStream& rng) const {
    return generate(family, length, rng, chain_ptr());
  }
};

/// Lengths of maximal constant runs, in order. A run cut by either end is included.
std::vector<std::size_t> run_lengths(const BipolarSequence& seq);

/// Fraction of adjacent chip pairs that differ.
double empirical_transition_density(const BipolarSequence& seq);

/// mean over j of chips[j] * chips[j + m], m = 0..max_lag (not cycle-aware).
std::vector<double> empirical_autocorrelation(const BipolarSequence& seq, std::size_t max_lag);

}  // namespace crd
