#ifndef FED3R_CORE_RNG_HPP
#define FED3R_CORE_RNG_HPP

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace fed3r {

// SplitMix64. The value at counter i is a pure function of (seed, i), so a
// stream can be evaluated out of order or reconstructed anywhere from the
// seed alone.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Sub-stream derivation: global seed XOR hash of a role string. Every source
// of randomness in a run draws from a seed derived this way, so one global
// seed pins the whole run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view role) {
  return seed ^ fnv1a64(role);
}

inline double u64_to_unit_double(std::uint64_t r) {
  return static_cast<double>(r >> 11) * 0x1.0p-53;  // [0, 1)
}

// Sequential generator with hand-rolled distributions. The standard library
// distributions are implementation-defined, which would break the
// bit-reproducibility contract across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    return splitmix64_at(state_, counter_++);
  }

  // [0, 1)
  double next_double() { return u64_to_unit_double(next_u64()); }

  // (0, 1]
  double next_open_double() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Box-Muller, cosine branch.
  double normal() {
    const double u1 = next_open_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    assert(bound > 0);
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Marsaglia-Tsang; the alpha < 1 case goes through the boost identity
  // Gamma(a) = Gamma(a+1) * U^(1/a).
  double gamma(double alpha) {
    assert(alpha > 0.0);
    if (alpha < 1.0) {
      const double u = next_open_double();
      return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = next_open_double();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v;
      }
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // kappa distinct values from [0, pool). Partial Fisher-Yates over a
  // caller-held scratch permutation that persists between draws.
  std::vector<std::uint32_t> sample_distinct(std::vector<std::uint32_t>& pool,
                                             std::size_t kappa) {
    assert(kappa <= pool.size());
    for (std::size_t i = 0; i < kappa; ++i) {
      const std::size_t j = i + below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    return std::vector<std::uint32_t>(pool.begin(), pool.begin() + kappa);
  }

 private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
};

}  // namespace fed3r

#endif
