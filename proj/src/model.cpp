#include "nadegsn/model.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace nadegsn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::rectifier: return "rectifier";
    case Activation::sigmoid_act: return "sigmoid";
    case Activation::tanh_act: return "tanh";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  if (name == "rectifier" || name == "relu") return Activation::rectifier;
  if (name == "sigmoid") return Activation::sigmoid_act;
  if (name == "tanh") return Activation::tanh_act;
  raise(Errc::bad_config, "unknown activation '" + name + "'");
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = input_weights.size() + output_weights.size() + output_biases.size();
  for (const auto& w : hidden_weights) n += w.size();
  for (const auto& b : hidden_biases) n += b.size();
  return n;
}

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double clamp_prob(double p) {
  return std::min(1.0 - kProbEps, std::max(kProbEps, p));
}

// y = M v + b with M row-major (rows x cols). Four independent partial sums
// per row: the combine order is fixed (deterministic results) while the
// accumulator chains are independent enough to vectorize.
void affine(const double* m, const double* v, const double* b, double* y, int rows, int cols) {
  const int tail = cols & 3;
  const int main = cols - tail;
  for (int r = 0; r < rows; ++r) {
    const double* row = m + static_cast<std::size_t>(r) * cols;
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    for (int c = 0; c < main; c += 4) {
      a0 += row[c] * v[c];
      a1 += row[c + 1] * v[c + 1];
      a2 += row[c + 2] * v[c + 2];
      a3 += row[c + 3] * v[c + 3];
    }
    double acc = (a0 + a1) + (a2 + a3);
    for (int c = main; c < cols; ++c) acc += row[c] * v[c];
    y[r] = b[r] + acc;
  }
}

void apply_activation(Activation act, const std::vector<double>& z, std::vector<double>& a) {
  const std::size_t n = z.size();
  a.resize(n);
  switch (act) {
    case Activation::rectifier:
      for (std::size_t i = 0; i < n; ++i) a[i] = z[i] > 0 ? z[i] : 0.0;
      break;
    case Activation::sigmoid_act:
      for (std::size_t i = 0; i < n; ++i) a[i] = sigmoid(z[i]);
      break;
    case Activation::tanh_act:
      for (std::size_t i = 0; i < n; ++i) a[i] = std::tanh(z[i]);
      break;
  }
}

void check_dims(const ModelParams& p) {
  if (p.D < 1 || p.H < 1 || p.L < 1) raise(Errc::bad_dims, "D, H, L must all be >= 1");
}

}  // namespace

ModelParams init_params(int D, int H, int L, Activation activation, std::uint64_t seed) {
  if (D < 1 || H < 1 || L < 1) raise(Errc::bad_dims, "D, H, L must all be >= 1");
  ModelParams p;
  p.D = D;
  p.H = H;
  p.L = L;
  p.activation = activation;

  Rng rng(mix_seed(seed, stream_tag::init, 0));
  auto glorot = [&rng](std::vector<double>& w, std::size_t count, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    w.resize(count);
    for (auto& v : w) v = rng.uniform(-bound, bound);
  };

  glorot(p.input_weights, static_cast<std::size_t>(H) * 2 * D, 2 * D, H);
  p.hidden_weights.resize(static_cast<std::size_t>(L - 1));
  for (auto& w : p.hidden_weights) glorot(w, static_cast<std::size_t>(H) * H, H, H);
  glorot(p.output_weights, static_cast<std::size_t>(D) * H, H, D);

  p.hidden_biases.assign(static_cast<std::size_t>(L),
                         std::vector<double>(static_cast<std::size_t>(H), 0.0));
  p.output_biases.assign(static_cast<std::size_t>(D), 0.0);
  return p;
}

void conditionals_into(const ModelParams& params, const BinaryVector& x, const Mask& mask,
                       ForwardTrace& trace) {
  check_dims(params);
  const int D = params.D, H = params.H, L = params.L;
  if (static_cast<int>(x.size()) != D || mask.size() != D)
    raise(Errc::shape_mismatch, "x and mask must have length D");

  trace.input.resize(static_cast<std::size_t>(2) * D);
  for (int i = 0; i < D; ++i) {
    const double m = mask.bits[static_cast<std::size_t>(i)];
    trace.input[static_cast<std::size_t>(i)] = m;
    trace.input[static_cast<std::size_t>(D + i)] = m * x[static_cast<std::size_t>(i)];
  }

  trace.pre_activations.resize(static_cast<std::size_t>(L));
  trace.activations.resize(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    trace.pre_activations[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(H));
    auto& z = trace.pre_activations[static_cast<std::size_t>(l)];
    if (l == 0) {
      affine(params.input_weights.data(), trace.input.data(), params.hidden_biases[0].data(),
             z.data(), H, 2 * D);
    } else {
      affine(params.hidden_weights[static_cast<std::size_t>(l - 1)].data(),
             trace.activations[static_cast<std::size_t>(l - 1)].data(),
             params.hidden_biases[static_cast<std::size_t>(l)].data(), z.data(), H, H);
    }
    apply_activation(params.activation, z, trace.activations[static_cast<std::size_t>(l)]);
  }

  const auto& top = trace.activations[static_cast<std::size_t>(L - 1)];
  trace.probabilities.resize(static_cast<std::size_t>(D));
  for (int i = 0; i < D; ++i) {
    const double* row = params.output_weights.data() + static_cast<std::size_t>(i) * H;
    double acc = params.output_biases[static_cast<std::size_t>(i)];
    for (int j = 0; j < H; ++j) acc += row[j] * top[static_cast<std::size_t>(j)];
    trace.probabilities[static_cast<std::size_t>(i)] = clamp_prob(sigmoid(acc));
  }
}

ForwardTrace conditionals(const ModelParams& params, const BinaryVector& x, const Mask& mask) {
  ForwardTrace trace;
  conditionals_into(params, x, mask, trace);
  return trace;
}

double log_likelihood_fixed_order(const ModelParams& params, const BinaryVector& x,
                                  const Ordering& ordering) {
  const int D = params.D;
  if (static_cast<int>(x.size()) != D || static_cast<int>(ordering.perm.size()) != D)
    raise(Errc::shape_mismatch, "x and ordering must have length D");
  Mask mask = Mask::zeros(D);
  ForwardTrace trace;
  double total = 0.0;
  for (int d = 0; d < D; ++d) {
    conditionals_into(params, x, mask, trace);
    const int i = ordering.perm[static_cast<std::size_t>(d)];
    total += log_bernoulli(x[static_cast<std::size_t>(i)],
                           trace.probabilities[static_cast<std::size_t>(i)]);
    mask.bits[static_cast<std::size_t>(i)] = 1;
  }
  return total;
}

namespace {

double log_mean_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc / static_cast<double>(v.size()));
}

}  // namespace

double log_likelihood_ensemble(const ModelParams& params, const BinaryVector& x, int n_orderings,
                               std::uint64_t seed) {
  if (n_orderings < 1) raise(Errc::bad_input, "n_orderings must be >= 1");
  Rng rng(mix_seed(seed, stream_tag::ordering, 0));
  std::vector<double> lls(static_cast<std::size_t>(n_orderings));
  for (int k = 0; k < n_orderings; ++k) {
    const Ordering ord = random_ordering(params.D, rng);
    lls[static_cast<std::size_t>(k)] = log_likelihood_fixed_order(params, x, ord);
  }
  return log_mean_exp(lls);
}

double log_likelihood_all_orders(const ModelParams& params, const BinaryVector& x) {
  if (params.D > 8) raise(Errc::too_large, "exhaustive ordering average is guarded to D <= 8");
  Ordering ord = Ordering::identity(params.D);
  std::vector<double> lls;
  do {
    lls.push_back(log_likelihood_fixed_order(params, x, ord));
  } while (std::next_permutation(ord.perm.begin(), ord.perm.end()));
  return log_mean_exp(lls);
}

// ---------------------------------------------------------------------------
// checkpoint I/O

namespace {

constexpr char kMagic[4] = {'N', 'A', 'D', 'E'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}
void put_f64(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  if (!in) raise(Errc::corrupt, "checkpoint ended inside a header field");
  return v;
}
std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  if (!in) raise(Errc::corrupt, "checkpoint ended inside the trailer");
  return v;
}
void get_f64(std::ifstream& in, std::vector<double>& v, std::size_t count) {
  v.resize(count);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
    raise(Errc::corrupt, "checkpoint weight blob shorter than its header promises");
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  check_dims(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::not_found, "cannot write " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(params.D));
  put_u32(out, static_cast<std::uint32_t>(params.H));
  put_u32(out, static_cast<std::uint32_t>(params.L));
  put_u32(out, static_cast<std::uint32_t>(params.activation));
  put_f64(out, params.input_weights);
  for (const auto& w : params.hidden_weights) put_f64(out, w);
  for (const auto& b : params.hidden_biases) put_f64(out, b);
  put_f64(out, params.output_weights);
  put_f64(out, params.output_biases);
  put_u64(out, params.parameter_count());
  if (!out) raise(Errc::corrupt, "write failed for " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::not_found, "cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    raise(Errc::bad_magic, path + " is not a NADE checkpoint");
  const std::uint32_t version = get_u32(in);
  if (version != kVersion)
    raise(Errc::version_mismatch,
          "checkpoint version " + std::to_string(version) + ", expected " +
              std::to_string(kVersion));
  ModelParams p;
  p.D = static_cast<int>(get_u32(in));
  p.H = static_cast<int>(get_u32(in));
  p.L = static_cast<int>(get_u32(in));
  const std::uint32_t act = get_u32(in);
  if (p.D < 1 || p.H < 1 || p.L < 1 || act > 2)
    raise(Errc::corrupt, "checkpoint header holds invalid dimensions");
  p.activation = static_cast<Activation>(act);

  get_f64(in, p.input_weights, static_cast<std::size_t>(p.H) * 2 * p.D);
  p.hidden_weights.resize(static_cast<std::size_t>(p.L - 1));
  for (auto& w : p.hidden_weights) get_f64(in, w, static_cast<std::size_t>(p.H) * p.H);
  p.hidden_biases.resize(static_cast<std::size_t>(p.L));
  for (auto& b : p.hidden_biases) get_f64(in, b, static_cast<std::size_t>(p.H));
  get_f64(in, p.output_weights, static_cast<std::size_t>(p.D) * p.H);
  get_f64(in, p.output_biases, static_cast<std::size_t>(p.D));

  const std::uint64_t declared = get_u64(in);
  if (declared != p.parameter_count())
    raise(Errc::corrupt, "checkpoint float count disagrees with its dimensions");
  // Nothing may follow the trailer.
  char extra;
  if (in.read(&extra, 1))
    raise(Errc::corrupt, "trailing bytes after checkpoint trailer");
  for (double v : p.input_weights)
    if (!std::isfinite(v)) raise(Errc::corrupt, "non-finite weight in checkpoint");
  return p;
}

}  // namespace nadegsn
