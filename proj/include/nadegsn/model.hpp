#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nadegsn/types.hpp"

namespace nadegsn {

// Checkpoint codes are part of the file format: rectifier=0, sigmoid=1,
// tanh=2.
enum class Activation : std::uint32_t { rectifier = 0, sigmoid_act = 1, tanh_act = 2 };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Mask-conditioned deep network. The first layer consumes the concatenation
// [m, m*x] of width 2D; the output layer maps the top hidden activation to D
// Bernoulli logits.
struct ModelParams {
  int D = 0;
  int H = 0;
  int L = 0;
  Activation activation = Activation::rectifier;

  std::vector<double> input_weights;                // H x 2D, row-major
  std::vector<std::vector<double>> hidden_weights;  // L-1 matrices, H x H row-major
  std::vector<std::vector<double>> hidden_biases;   // L vectors of length H
  std::vector<double> output_weights;               // D x H, row-major
  std::vector<double> output_biases;                // D

  std::size_t parameter_count() const;
};

// Output probabilities are clamped into [kProbEps, 1-kProbEps] before any log
// is taken, so log-likelihoods stay finite.
inline constexpr double kProbEps = 1e-7;

struct ForwardTrace {
  std::vector<double> input;                         // [m, m*x], length 2D
  std::vector<std::vector<double>> pre_activations;  // L x H
  std::vector<std::vector<double>> activations;      // L x H
  std::vector<double> probabilities;                 // D, clamped
};

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out)) per matrix), zero
// biases. Draw order: input_weights row-major, hidden_weights[0..L-2],
// output_weights. Throws BadDims.
ModelParams init_params(int D, int H, int L, Activation activation, std::uint64_t seed);

// One forward pass; probabilities[i] = model p(x_i = 1 | coordinates with
// m=1). Outputs at masked-in positions are computed but carry no meaning.
// The _into variant reuses the trace's buffers (no allocation after the
// first call).
void conditionals_into(const ModelParams& params, const BinaryVector& x, const Mask& mask,
                       ForwardTrace& trace);
ForwardTrace conditionals(const ModelParams& params, const BinaryVector& x, const Mask& mask);

// Exact log p(x) under the NADE factorization along `ordering`; D forward
// passes.
double log_likelihood_fixed_order(const ModelParams& params, const BinaryVector& x,
                                  const Ordering& ordering);

// log of the arithmetic mean of per-ordering probabilities over n_orderings
// uniformly drawn orderings (log-mean-exp). Deterministic given seed.
double log_likelihood_ensemble(const ModelParams& params, const BinaryVector& x,
                               int n_orderings, std::uint64_t seed);

// Exhaustive ensemble average over all D! orderings; guarded to D <= 8.
double log_likelihood_all_orders(const ModelParams& params, const BinaryVector& x);

// Binary checkpoint, little-endian: magic "NADE", u32 version=1, u32 D, H, L,
// activation code, then f64 blobs row-major (input_weights,
// hidden_weights[0..L-2], hidden_biases[0..L-1], output_weights,
// output_biases), trailing u64 total float count.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

inline double log_bernoulli(std::uint8_t x, double p) {
  return x ? std::log(p) : std::log1p(-p);
}

}  // namespace nadegsn
