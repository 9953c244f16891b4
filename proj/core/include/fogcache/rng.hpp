#pragma once

#include <cstdint>
#include <string_view>

namespace fogcache {

// Finalizer from SplitMix64; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// 64-bit FNV-1a over the bytes of `key`.
std::uint64_t fnv1a64(std::string_view key) noexcept;

// Keyed sub-seed derivation used everywhere a component needs its own
// random stream: derive_seed(parent, key) = mix64(parent ^ fnv1a64(key)).
// Sub-seeds therefore depend only on the master seed and a stable label,
// so any stage can be re-run in isolation.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view key) noexcept;

// SplitMix64 generator with hand-written distributions. The standard
// <random> distributions are implementation-defined, which would break
// byte-identical output across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  // Independent stream for element `index` of a keyed sequence. Parallel and
  // sequential consumers see the same values for the same index.
  static Rng for_index(std::uint64_t seed, std::uint64_t index) noexcept;

  std::uint64_t next() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;

  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  // True with probability p; p <= 0 never fires and p >= 1 always fires.
  bool bernoulli(double p) noexcept;

  double uniform(double lo, double hi) noexcept;
  double normal() noexcept;
  double lognormal(double mu, double sigma) noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace fogcache
