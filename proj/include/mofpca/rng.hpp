#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace mofpca {

/// Seedable random source used by every stochastic operator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard, and all derived draws (bounded integers, unit reals) are computed
/// here rather than through std:: distributions, whose algorithms differ
/// between standard library implementations. A given seed therefore produces
/// the same run on every platform.
///
/// Streams: `Rng::stream(seed, id)` derives an independent generator for a
/// numbered sub-task (for example one target dimension of a sweep) by mixing
/// the seed and the id with SplitMix64. Work that is spread over threads only
/// ever evaluates objectives, which consumes no randomness, so the random
/// sequence of a run does not depend on the worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id) {
    return Rng(splitmix64(seed ^ splitmix64(id + 0x9e3779b97f4a7c15ULL)));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Unbiased (rejection on the top range).
  std::size_t below(std::size_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t b = bound;
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % b);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<std::size_t>(x % b);
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin() { return (next() >> 63) != 0; }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mofpca
