#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nadegsn/types.hpp"

namespace nadegsn {

// Raw IDX image payload, exactly as stored in the file.
struct RawImageSet {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image
};

enum class SplitTag { train, valid, test, synthetic };

struct BinaryDataset {
  int D = 0;
  std::vector<BinaryVector> items;
  SplitTag split_tag = SplitTag::synthetic;
};

// IDX container: big-endian u32 magic 0x00000803, count, rows, cols, then
// unsigned bytes row-major. Throws BadMagic / Truncated / NotFound.
RawImageSet load_idx_images(const std::string& path);

// Sibling loader for label files (magic 0x00000801). Loaded but unused by the
// modeling pipeline.
std::vector<std::uint8_t> load_idx_labels(const std::string& path);

// Block-average pooling by an integer factor on the raw grayscale, e.g.
// 28x28 -> 14x14 with factor 2. Rows and cols must be divisible by factor.
RawImageSet downsample(const RawImageSet& raw, int factor);

// Scale each pixel to [0,1] by /255, then map to 1 iff strictly > 0.5
// (so byte 128 -> 1, byte 127 -> 0). D = rows * cols.
BinaryDataset binarize(const RawImageSet& raw);

// Prefix split preserving order: first n_train items tagged train, next
// n_valid tagged valid. Throws TooFewItems.
std::pair<BinaryDataset, BinaryDataset> split(const BinaryDataset& dataset, int n_train,
                                              int n_valid);

// Each item: uniformly chosen prototype, every bit independently flipped with
// probability flip_prob. Bit-reproducible given seed. Throws BadFlipProb
// unless 0 <= flip_prob < 0.5.
BinaryDataset synthetic_prototypes(int D, const std::vector<BinaryVector>& prototypes,
                                   double flip_prob, int n, std::uint64_t seed);

// Text container shared by ingested splits and sample sets: header line
// "D n", then one 0/1 string per item.
void write_binary_dataset(const BinaryDataset& dataset, const std::string& path);
BinaryDataset load_binary_dataset(const std::string& path);

}  // namespace nadegsn
