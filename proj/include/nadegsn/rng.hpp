#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace nadegsn {

// splitmix64 step: advances `state` and returns the next output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Substream seed derivation: two splitmix64 rounds over
// seed + (stream+1)*golden_ratio. Distinct stream ids give independent,
// reproducible generators from one user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  (void)splitmix64(s);
  return splitmix64(s);
}

// Subsystems tag their substreams so that e.g. chain 3 and epoch 3 never
// collide under the same user seed.
namespace stream_tag {
inline constexpr std::uint64_t epoch = 1;
inline constexpr std::uint64_t chain = 2;
inline constexpr std::uint64_t ordering = 3;
inline constexpr std::uint64_t sample = 4;
inline constexpr std::uint64_t init = 5;
inline constexpr std::uint64_t validate = 6;
inline constexpr std::uint64_t synthetic = 7;
}  // namespace stream_tag

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return mix_seed(seed, (tag << 32) ^ index);
}

// mt19937_64 core with hand-rolled distributions. The standard specifies the
// engine output exactly but not the <random> distributions, so every draw
// here goes through our own mappings to stay bit-reproducible across
// platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1) with 53 usable bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Unbiased integer on [0, n); rejection from the top. Consumes a variable
  // (but seed-determined) number of raw draws.
  std::uint64_t below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Standard normal via Box-Muller; exactly two uniform draws per call, no
  // cached spare.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Fisher-Yates, descending.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nadegsn
