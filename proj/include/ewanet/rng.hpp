#pragma once

#include <cmath>
#include <cstdint>

namespace ewanet {

// Counter-based 64-bit generator (splitmix64 finalizer). Every output is a
// pure function of (seed, counter), so parallel consumers can share a seed
// and derive disjoint streams without state handoff. Determinism is
// guaranteed per seed within this implementation, not across platforms.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_u64(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

// Uniform in [0, 1) from the top 53 bits.
inline double unit_at(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(mix_u64(seed, counter) >> 11) * 0x1.0p-53;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix_u64(seed_, counter_++); }
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Box-Muller; consumes two counters per call, no cached spare.
  double normal(double mean, double stddev) {
    double u1 = next_unit();
    const double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  // Independent child seed, e.g. one per simulation index.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    return mix_u64(master, index);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace ewanet
