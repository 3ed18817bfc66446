#include "nadegsn/data.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nadegsn {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) raise(Errc::truncated, "file ended inside a header field");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::not_found, "cannot open " + path);
  return in;
}

}  // namespace

RawImageSet load_idx_images(const std::string& path) {
  std::ifstream in = open_binary(path);
  const std::uint32_t magic = read_be_u32(in);
  if (magic != kImageMagic) {
    std::ostringstream msg;
    msg << path << " has magic " << magic << ", expected " << kImageMagic << " (IDX images)";
    raise(Errc::bad_magic, msg.str());
  }
  RawImageSet raw;
  raw.count = static_cast<int>(read_be_u32(in));
  raw.rows = static_cast<int>(read_be_u32(in));
  raw.cols = static_cast<int>(read_be_u32(in));
  if (raw.rows < 1 || raw.cols < 1 || raw.count < 0)
    raise(Errc::corrupt, "nonsensical IDX header in " + path);
  const std::size_t expected =
      static_cast<std::size_t>(raw.count) * raw.rows * raw.cols;
  raw.pixels.resize(expected);
  in.read(reinterpret_cast<char*>(raw.pixels.data()), static_cast<std::streamsize>(expected));
  if (static_cast<std::size_t>(in.gcount()) != expected)
    raise(Errc::truncated, path + " promises " + std::to_string(expected) + " pixels but holds " +
                               std::to_string(in.gcount()));
  return raw;
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
  std::ifstream in = open_binary(path);
  const std::uint32_t magic = read_be_u32(in);
  if (magic != kLabelMagic)
    raise(Errc::bad_magic, path + " is not an IDX label file");
  const auto count = read_be_u32(in);
  std::vector<std::uint8_t> labels(count);
  in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    raise(Errc::truncated, path + " holds fewer labels than its header promises");
  return labels;
}

RawImageSet downsample(const RawImageSet& raw, int factor) {
  if (factor < 1) raise(Errc::bad_input, "downsample factor must be >= 1");
  if (factor == 1) return raw;
  if (raw.rows % factor != 0 || raw.cols % factor != 0)
    raise(Errc::bad_input, "image dims not divisible by downsample factor");
  RawImageSet out;
  out.count = raw.count;
  out.rows = raw.rows / factor;
  out.cols = raw.cols / factor;
  out.pixels.resize(static_cast<std::size_t>(out.count) * out.rows * out.cols);
  const double block = static_cast<double>(factor) * factor;
  for (int n = 0; n < raw.count; ++n) {
    const std::size_t src = static_cast<std::size_t>(n) * raw.rows * raw.cols;
    const std::size_t dst = static_cast<std::size_t>(n) * out.rows * out.cols;
    for (int r = 0; r < out.rows; ++r) {
      for (int c = 0; c < out.cols; ++c) {
        double acc = 0;
        for (int dr = 0; dr < factor; ++dr)
          for (int dc = 0; dc < factor; ++dc)
            acc += raw.pixels[src + static_cast<std::size_t>(r * factor + dr) * raw.cols +
                              (c * factor + dc)];
        const double mean = acc / block;
        out.pixels[dst + static_cast<std::size_t>(r) * out.cols + c] =
            static_cast<std::uint8_t>(mean + 0.5);
      }
    }
  }
  return out;
}

BinaryDataset binarize(const RawImageSet& raw) {
  BinaryDataset ds;
  ds.D = raw.rows * raw.cols;
  ds.split_tag = SplitTag::train;
  ds.items.resize(static_cast<std::size_t>(raw.count));
  for (int n = 0; n < raw.count; ++n) {
    BinaryVector& item = ds.items[static_cast<std::size_t>(n)];
    item.resize(static_cast<std::size_t>(ds.D));
    const std::size_t base = static_cast<std::size_t>(n) * ds.D;
    for (int i = 0; i < ds.D; ++i)
      item[static_cast<std::size_t>(i)] = (raw.pixels[base + i] / 255.0 > 0.5) ? 1 : 0;
  }
  return ds;
}

std::pair<BinaryDataset, BinaryDataset> split(const BinaryDataset& dataset, int n_train,
                                              int n_valid) {
  if (n_train < 0 || n_valid < 0) raise(Errc::bad_input, "split sizes must be nonnegative");
  const std::size_t need = static_cast<std::size_t>(n_train) + n_valid;
  if (need > dataset.items.size())
    raise(Errc::too_few_items, "asked for " + std::to_string(need) + " items, dataset has " +
                                   std::to_string(dataset.items.size()));
  BinaryDataset train, valid;
  train.D = valid.D = dataset.D;
  train.split_tag = SplitTag::train;
  valid.split_tag = SplitTag::valid;
  train.items.assign(dataset.items.begin(), dataset.items.begin() + n_train);
  valid.items.assign(dataset.items.begin() + n_train, dataset.items.begin() + n_train + n_valid);
  return {std::move(train), std::move(valid)};
}

BinaryDataset synthetic_prototypes(int D, const std::vector<BinaryVector>& prototypes,
                                   double flip_prob, int n, std::uint64_t seed) {
  if (!(flip_prob >= 0.0 && flip_prob < 0.5))
    raise(Errc::bad_flip_prob, "flip_prob must lie in [0, 0.5)");
  if (prototypes.empty()) raise(Errc::bad_input, "need at least one prototype");
  for (const auto& proto : prototypes)
    if (static_cast<int>(proto.size()) != D)
      raise(Errc::shape_mismatch, "prototype length differs from D");

  BinaryDataset ds;
  ds.D = D;
  ds.split_tag = SplitTag::synthetic;
  ds.items.resize(static_cast<std::size_t>(n));
  Rng rng(mix_seed(seed, stream_tag::synthetic, 0));
  // Draw order per item: prototype index, then one flip decision per bit.
  for (int k = 0; k < n; ++k) {
    const auto& proto = prototypes[rng.below(prototypes.size())];
    BinaryVector& item = ds.items[static_cast<std::size_t>(k)];
    item = proto;
    for (int i = 0; i < D; ++i)
      if (rng.bernoulli(flip_prob)) item[static_cast<std::size_t>(i)] ^= 1;
  }
  return ds;
}

void write_binary_dataset(const BinaryDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::not_found, "cannot write " + path);
  out << dataset.D << ' ' << dataset.items.size() << '\n';
  std::string line(static_cast<std::size_t>(dataset.D), '0');
  for (const auto& item : dataset.items) {
    for (int i = 0; i < dataset.D; ++i)
      line[static_cast<std::size_t>(i)] = item[static_cast<std::size_t>(i)] ? '1' : '0';
    out << line << '\n';
  }
  if (!out) raise(Errc::corrupt, "write failed for " + path);
}

BinaryDataset load_binary_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::not_found, "cannot open " + path);
  BinaryDataset ds;
  std::size_t n = 0;
  if (!(in >> ds.D >> n)) raise(Errc::corrupt, "bad header in " + path);
  if (ds.D < 1) raise(Errc::corrupt, "bad dimensionality in " + path);
  ds.items.resize(n);
  std::string line;
  std::getline(in, line);  // rest of header line
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::getline(in, line))
      raise(Errc::truncated, path + " holds fewer items than its header promises");
    if (static_cast<int>(line.size()) != ds.D)
      raise(Errc::corrupt, "item " + std::to_string(k) + " has wrong length in " + path);
    BinaryVector& item = ds.items[k];
    item.resize(static_cast<std::size_t>(ds.D));
    for (int i = 0; i < ds.D; ++i) {
      const char c = line[static_cast<std::size_t>(i)];
      if (c != '0' && c != '1')
        raise(Errc::corrupt, "non-binary character in " + path);
      item[static_cast<std::size_t>(i)] = (c == '1');
    }
  }
  return ds;
}

}  // namespace nadegsn
