#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "nadegsn/errors.hpp"
#include "nadegsn/rng.hpp"

namespace nadegsn {

// Binary configuration; entries are 0 or 1.
using BinaryVector = std::vector<std::uint8_t>;

// Observation mask m: bit i = 1 means coordinate i is observed (kept).
struct Mask {
  BinaryVector bits;

  static Mask zeros(int d) { return Mask{BinaryVector(static_cast<std::size_t>(d), 0)}; }
  static Mask ones(int d) { return Mask{BinaryVector(static_cast<std::size_t>(d), 1)}; }

  int size() const { return static_cast<int>(bits.size()); }
  int popcount() const {
    int c = 0;
    for (auto b : bits) c += b;
    return c;
  }
};

// A permutation of {0..D-1}; prefix perm[0..d-2] plays the role of the
// conditioning set at position d.
struct Ordering {
  std::vector<int> perm;

  static Ordering identity(int d) {
    Ordering o;
    o.perm.resize(static_cast<std::size_t>(d));
    std::iota(o.perm.begin(), o.perm.end(), 0);
    return o;
  }
};

inline Ordering random_ordering(int d, Rng& rng) {
  Ordering o = Ordering::identity(d);
  rng.shuffle(o.perm);
  return o;
}

// Uniformly random k-subset of {0..d-1} as a mask, via partial Fisher-Yates.
inline Mask random_subset_mask(int d, int k, Rng& rng) {
  if (k < 0 || k > d) raise(Errc::bad_input, "subset size out of range");
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  Mask m = Mask::zeros(d);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    m.bits[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
  }
  return m;
}

}  // namespace nadegsn
