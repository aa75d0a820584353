#pragma once

#include <cstdint>
#include <initializer_list>

namespace codap {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Order-sensitive hash of a key tuple, used to derive per-trial seeds.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept;

/// Counter-based generator: draw i of stream `key` is mix64(key, i), so
/// streams for distinct keys are independent of scheduling order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  std::uint64_t next() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Poisson variate: sequential-search inversion below mean 30, Hormann's
/// transformed rejection (PTRS) above.
std::int64_t sample_poisson(double mean, CounterRng& rng);

}  // namespace codap
