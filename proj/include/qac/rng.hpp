#pragma once

#include <cstdint>

namespace qac {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the k-th draw is a pure function of (key, k), so
/// realization r of an ensemble never depends on how many draws any other
/// realization consumed. Uniform doubles are built from the top 53 bits so the
/// values are identical on every platform.
class Substream {
public:
  Substream(std::uint64_t master_seed, std::uint64_t stream) noexcept
      : key_(mix64(master_seed ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform in [0, 1).
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [-w, w).
  double symmetric(double w) noexcept { return w * (2.0 * uniform01() - 1.0); }

  std::uint64_t draws() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace qac
