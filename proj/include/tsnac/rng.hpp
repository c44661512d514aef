#pragma once

// Seeded randomness on top of the raw std::mt19937_64 output. The uniform
// helpers below give identical sequences on every standard library.
//
// Independent streams: stream s of seed S is seeded with splitmix64(S ^ s).

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tsnac {

enum class Stream : std::uint64_t { Topology = 1, Attachment = 2, Flows = 3 };

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t seed, Stream s) : eng_(splitmix64(seed ^ static_cast<std::uint64_t>(s))) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [lo, hi], by rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("empty integer range");
    const std::uint64_t span = hi - lo;
    if (span == ~std::uint64_t{0}) return next();
    const std::uint64_t n = span + 1;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return lo + x % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Fisher-Yates with uniform_int.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_int(0, i - 1)]);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace tsnac
