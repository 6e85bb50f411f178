#pragma once

#include <cstdint>
#include <limits>

namespace crd {

/// Counter-based splittable random stream.
///
/// Output i of a stream is a pure function of (key, i), where the key is derived from the
/// seed and the chain of split indices. Copying a stream replays it; children with distinct
/// indices have unrelated keys and can be consumed on different threads.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  /// Child stream keyed by (this stream's identity, index); the parent's counter is ignored.
  [[nodiscard]] RngStream split(std::uint64_t index) const;

  std::uint64_t next_u64() noexcept;
  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, n), unbiased. n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  /// +1 or -1 with equal probability.
  int sign() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

inline RngStream split_stream(const RngStream& parent, std::uint64_t index) { return parent.split(index); }

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace crd
