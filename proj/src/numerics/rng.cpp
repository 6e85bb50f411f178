#include "crd/numerics/rng.hpp"

#include <cmath>
#include <numbers>

namespace crd {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ULL;

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
  return mix64(mix64(seed ^ kSplitSalt) ^ mix64(stream_id + kGamma));
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(derive_key(seed, stream_id)) {}

RngStream RngStream::split(std::uint64_t index) const {
  const std::uint64_t child_id = mix64(key_ ^ mix64(index * kSplitSalt + kGamma));
  return RngStream(seed_, child_id);
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t x = key_ + (++counter_) * kGamma;
  return mix64(x);
}

double RngStream::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::uniform_index(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

int RngStream::sign() noexcept { return (next_u64() >> 63) != 0 ? 1 : -1; }

double RngStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace crd
