#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nadegsn/data.hpp"
#include "nadegsn/model.hpp"

namespace nadegsn {

struct TrainConfig {
  int epochs = 50;
  double lr_start = 1e-3;
  double lr_end = 0.0;
  int batch_size = 100;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

// One training draw for the order-agnostic objective: predict the D-d+1
// coordinates outside the mask given the d-1 masked-in ones.
struct MaskedExample {
  BinaryVector x;
  Mask mask;  // popcount = d-1
  int d;      // position index, 1..D
};

struct Gradient {
  std::vector<double> input_weights;
  std::vector<std::vector<double>> hidden_weights;
  std::vector<std::vector<double>> hidden_biases;
  std::vector<double> output_weights;
  std::vector<double> output_biases;

  static Gradient zeros_like(const ModelParams& params);
  double max_abs() const;
};

// d uniform on {1..D}, mask a uniformly random (d-1)-subset — equivalent in
// law to drawing a uniform ordering and truncating it at position d.
MaskedExample sample_masked_example(const BinaryVector& x, int D, Rng& rng);

// Negative weighted stochastic objective: D/(D-d+1) times the summed
// Bernoulli cross-entropy over coordinates outside the mask. One forward
// pass.
double oa_loss(const ModelParams& params, const MaskedExample& ex);

// Gradient of the mean oa_loss over the batch. Masked-in output units carry
// zero output-layer error. Optionally reports the batch mean loss.
Gradient oa_grad(const ModelParams& params, const std::vector<MaskedExample>& batch,
                 double* mean_loss = nullptr);

// theta -= lr * grad
void apply_update(ModelParams& params, const Gradient& grad, double lr);

// lr_start + (lr_end - lr_start) * epoch/(epochs-1); lr_start when epochs==1.
double learning_rate(const TrainConfig& config, int epoch_index);

// One pass over the (optionally shuffled) dataset in batches with a fresh
// masked example per item visit. Returns the mean training loss. The epoch's
// randomness derives from (config.seed, epoch_index) only.
double sgd_epoch(ModelParams& params, const BinaryDataset& dataset, const TrainConfig& config,
                 int epoch_index);

// Mean oa_loss over the validation set with n_draws_per_item fresh masked
// examples per item. Deterministic given seed.
double validate(const ModelParams& params, const BinaryDataset& valid, int n_draws_per_item,
                std::uint64_t seed);

struct FitOptions {
  std::string log_path;           // per-epoch CSV: epoch, lr, train_loss, valid_loss, wall_seconds
  std::string checkpoint_prefix;  // writes <prefix>_best.nade and <prefix>_final.nade
  int checkpoint_every = 0;       // additionally <prefix>_epoch<N>.nade every k epochs (0 = off)
  int valid_draws = 1;
};

struct FitResult {
  int best_epoch = -1;
  double best_valid_loss = 0.0;
  std::vector<double> train_losses;
  std::vector<double> valid_losses;
};

// Full training loop: sgd_epoch + validate per epoch, CSV log, periodic and
// best-validation checkpoints.
FitResult fit(ModelParams& params, const BinaryDataset& train, const BinaryDataset& valid,
              const TrainConfig& config, const FitOptions& options = {});

}  // namespace nadegsn
