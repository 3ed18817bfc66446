#include "nadegsn/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

namespace nadegsn {

Gradient Gradient::zeros_like(const ModelParams& p) {
  Gradient g;
  g.input_weights.assign(p.input_weights.size(), 0.0);
  g.hidden_weights.resize(p.hidden_weights.size());
  for (std::size_t l = 0; l < p.hidden_weights.size(); ++l)
    g.hidden_weights[l].assign(p.hidden_weights[l].size(), 0.0);
  g.hidden_biases.resize(p.hidden_biases.size());
  for (std::size_t l = 0; l < p.hidden_biases.size(); ++l)
    g.hidden_biases[l].assign(p.hidden_biases[l].size(), 0.0);
  g.output_weights.assign(p.output_weights.size(), 0.0);
  g.output_biases.assign(p.output_biases.size(), 0.0);
  return g;
}

double Gradient::max_abs() const {
  double m = 0.0;
  auto scan = [&m](const std::vector<double>& v) {
    for (double x : v) m = std::max(m, std::abs(x));
  };
  scan(input_weights);
  for (const auto& w : hidden_weights) scan(w);
  for (const auto& b : hidden_biases) scan(b);
  scan(output_weights);
  scan(output_biases);
  return m;
}

MaskedExample sample_masked_example(const BinaryVector& x, int D, Rng& rng) {
  if (D < 1) raise(Errc::bad_dims, "D must be >= 1");
  const int d = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(D)));
  MaskedExample ex;
  ex.x = x;
  ex.mask = random_subset_mask(D, d - 1, rng);
  ex.d = d;
  return ex;
}

namespace {

void check_example(const ModelParams& params, const MaskedExample& ex) {
  if (static_cast<int>(ex.x.size()) != params.D || ex.mask.size() != params.D)
    raise(Errc::shape_mismatch, "masked example does not match model dimensionality");
  if (ex.d < 1 || ex.d > params.D || ex.mask.popcount() != ex.d - 1)
    raise(Errc::bad_input, "mask popcount must equal d-1");
}

double loss_from_trace(const ModelParams& params, const MaskedExample& ex,
                       const ForwardTrace& trace) {
  const int D = params.D;
  const double weight = static_cast<double>(D) / (D - ex.d + 1);
  double ce = 0.0;
  for (int i = 0; i < D; ++i) {
    if (ex.mask.bits[static_cast<std::size_t>(i)]) continue;
    ce += log_bernoulli(ex.x[static_cast<std::size_t>(i)],
                        trace.probabilities[static_cast<std::size_t>(i)]);
  }
  return -weight * ce;
}

}  // namespace

double oa_loss(const ModelParams& params, const MaskedExample& ex) {
  check_example(params, ex);
  ForwardTrace trace;
  conditionals_into(params, ex.x, ex.mask, trace);
  return loss_from_trace(params, ex, trace);
}

Gradient oa_grad(const ModelParams& params, const std::vector<MaskedExample>& batch,
                 double* mean_loss) {
  if (batch.empty()) raise(Errc::bad_input, "empty batch");
  const int D = params.D, H = params.H, L = params.L;
  Gradient g = Gradient::zeros_like(params);

  ForwardTrace trace;
  std::vector<double> delta_out(static_cast<std::size_t>(D));
  std::vector<double> dh(static_cast<std::size_t>(H));
  std::vector<double> dz(static_cast<std::size_t>(H));
  double loss_sum = 0.0;

  for (const MaskedExample& ex : batch) {
    check_example(params, ex);
    conditionals_into(params, ex.x, ex.mask, trace);
    loss_sum += loss_from_trace(params, ex, trace);

    const double weight = static_cast<double>(D) / (D - ex.d + 1);

    // Output layer: masked-in units carry no error; clamped probabilities
    // have zero local derivative (the clamped loss is constant there).
    for (int i = 0; i < D; ++i) {
      const double p = trace.probabilities[static_cast<std::size_t>(i)];
      if (ex.mask.bits[static_cast<std::size_t>(i)] || p <= kProbEps || p >= 1.0 - kProbEps) {
        delta_out[static_cast<std::size_t>(i)] = 0.0;
        continue;
      }
      delta_out[static_cast<std::size_t>(i)] =
          weight * (p - static_cast<double>(ex.x[static_cast<std::size_t>(i)]));
    }

    const auto& top = trace.activations[static_cast<std::size_t>(L - 1)];
    std::fill(dh.begin(), dh.end(), 0.0);
    for (int i = 0; i < D; ++i) {
      const double di = delta_out[static_cast<std::size_t>(i)];
      if (di == 0.0) continue;
      double* gw = g.output_weights.data() + static_cast<std::size_t>(i) * H;
      const double* vw = params.output_weights.data() + static_cast<std::size_t>(i) * H;
      for (int j = 0; j < H; ++j) {
        gw[j] += di * top[static_cast<std::size_t>(j)];
        dh[static_cast<std::size_t>(j)] += di * vw[j];
      }
      g.output_biases[static_cast<std::size_t>(i)] += di;
    }

    for (int l = L - 1; l >= 0; --l) {
      const auto& z = trace.pre_activations[static_cast<std::size_t>(l)];
      const auto& a = trace.activations[static_cast<std::size_t>(l)];
      for (int j = 0; j < H; ++j) {
        double dphi = 0.0;
        switch (params.activation) {
          case Activation::rectifier:
            dphi = z[static_cast<std::size_t>(j)] > 0 ? 1.0 : 0.0;
            break;
          case Activation::sigmoid_act: {
            const double s = a[static_cast<std::size_t>(j)];
            dphi = s * (1.0 - s);
            break;
          }
          case Activation::tanh_act: {
            const double t = a[static_cast<std::size_t>(j)];
            dphi = 1.0 - t * t;
            break;
          }
        }
        dz[static_cast<std::size_t>(j)] = dh[static_cast<std::size_t>(j)] * dphi;
        g.hidden_biases[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] +=
            dz[static_cast<std::size_t>(j)];
      }

      if (l == 0) {
        for (int j = 0; j < H; ++j) {
          const double dj = dz[static_cast<std::size_t>(j)];
          if (dj == 0.0) continue;
          double* gw = g.input_weights.data() + static_cast<std::size_t>(j) * 2 * D;
          for (int c = 0; c < 2 * D; ++c) gw[c] += dj * trace.input[static_cast<std::size_t>(c)];
        }
      } else {
        const auto& below = trace.activations[static_cast<std::size_t>(l - 1)];
        auto& gw_mat = g.hidden_weights[static_cast<std::size_t>(l - 1)];
        const auto& w_mat = params.hidden_weights[static_cast<std::size_t>(l - 1)];
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int j = 0; j < H; ++j) {
          const double dj = dz[static_cast<std::size_t>(j)];
          if (dj == 0.0) continue;
          double* gw = gw_mat.data() + static_cast<std::size_t>(j) * H;
          const double* w = w_mat.data() + static_cast<std::size_t>(j) * H;
          for (int k = 0; k < H; ++k) {
            gw[k] += dj * below[static_cast<std::size_t>(k)];
            dh[static_cast<std::size_t>(k)] += dj * w[k];
          }
        }
      }
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  auto scale = [inv](std::vector<double>& v) {
    for (double& x : v) x *= inv;
  };
  scale(g.input_weights);
  for (auto& w : g.hidden_weights) scale(w);
  for (auto& b : g.hidden_biases) scale(b);
  scale(g.output_weights);
  scale(g.output_biases);
  if (mean_loss) *mean_loss = loss_sum * inv;
  return g;
}

void apply_update(ModelParams& params, const Gradient& grad, double lr) {
  auto step = [lr](std::vector<double>& p, const std::vector<double>& g) {
    if (p.size() != g.size()) raise(Errc::shape_mismatch, "gradient shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
  };
  step(params.input_weights, grad.input_weights);
  for (std::size_t l = 0; l < params.hidden_weights.size(); ++l)
    step(params.hidden_weights[l], grad.hidden_weights[l]);
  for (std::size_t l = 0; l < params.hidden_biases.size(); ++l)
    step(params.hidden_biases[l], grad.hidden_biases[l]);
  step(params.output_weights, grad.output_weights);
  step(params.output_biases, grad.output_biases);
}

double learning_rate(const TrainConfig& config, int epoch_index) {
  if (config.epochs == 1) return config.lr_start;
  return config.lr_start +
         (config.lr_end - config.lr_start) * static_cast<double>(epoch_index) /
             static_cast<double>(config.epochs - 1);
}

double sgd_epoch(ModelParams& params, const BinaryDataset& dataset, const TrainConfig& config,
                 int epoch_index) {
  if (dataset.items.empty()) raise(Errc::empty_dataset, "cannot train on an empty dataset");
  if (dataset.D != params.D) raise(Errc::shape_mismatch, "dataset D differs from model D");
  if (config.epochs < 1 || config.batch_size < 1)
    raise(Errc::bad_config, "epochs and batch_size must be >= 1");
  if (!(config.lr_start >= config.lr_end && config.lr_end >= 0.0))
    raise(Errc::bad_config, "need lr_start >= lr_end >= 0");
  if (epoch_index < 0 || epoch_index >= config.epochs)
    raise(Errc::bad_input, "epoch index out of range");

  Rng rng(mix_seed(config.seed, stream_tag::epoch, static_cast<std::uint64_t>(epoch_index)));
  const double lr = learning_rate(config, epoch_index);

  std::vector<std::size_t> order(dataset.items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.shuffle) rng.shuffle(order);

  std::vector<MaskedExample> batch;
  batch.reserve(static_cast<std::size_t>(config.batch_size));
  double loss_sum = 0.0;
  std::size_t pos = 0;
  while (pos < order.size()) {
    batch.clear();
    const std::size_t end = std::min(order.size(), pos + static_cast<std::size_t>(config.batch_size));
    for (; pos < end; ++pos)
      batch.push_back(sample_masked_example(dataset.items[order[pos]], params.D, rng));
    double batch_loss = 0.0;
    const Gradient g = oa_grad(params, batch, &batch_loss);
    apply_update(params, g, lr);
    loss_sum += batch_loss * static_cast<double>(batch.size());
  }
  return loss_sum / static_cast<double>(dataset.items.size());
}

double validate(const ModelParams& params, const BinaryDataset& valid, int n_draws_per_item,
                std::uint64_t seed) {
  if (valid.items.empty()) raise(Errc::empty_dataset, "empty validation set");
  if (valid.D != params.D) raise(Errc::shape_mismatch, "dataset D differs from model D");
  if (n_draws_per_item < 1) raise(Errc::bad_input, "n_draws_per_item must be >= 1");
  Rng rng(mix_seed(seed, stream_tag::validate, 0));
  double loss_sum = 0.0;
  for (const auto& x : valid.items)
    for (int k = 0; k < n_draws_per_item; ++k)
      loss_sum += oa_loss(params, sample_masked_example(x, params.D, rng));
  return loss_sum / (static_cast<double>(valid.items.size()) * n_draws_per_item);
}

FitResult fit(ModelParams& params, const BinaryDataset& train, const BinaryDataset& valid,
              const TrainConfig& config, const FitOptions& options) {
  if (config.epochs < 1) raise(Errc::bad_config, "epochs must be >= 1");
  FitResult result;

  std::ofstream log;
  if (!options.log_path.empty()) {
    log.open(options.log_path);
    if (!log) raise(Errc::not_found, "cannot write " + options.log_path);
    log.precision(12);
    log << "epoch,lr,train_loss,valid_loss,wall_seconds\n";
  }

  for (int e = 0; e < config.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    const double train_loss = sgd_epoch(params, train, config, e);
    // Same validation draws every epoch, so the best-epoch comparison is
    // apples to apples.
    const double valid_loss = validate(params, valid, options.valid_draws, config.seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    result.train_losses.push_back(train_loss);
    result.valid_losses.push_back(valid_loss);
    if (result.best_epoch < 0 || valid_loss < result.best_valid_loss) {
      result.best_epoch = e;
      result.best_valid_loss = valid_loss;
      if (!options.checkpoint_prefix.empty())
        save_checkpoint(params, options.checkpoint_prefix + "_best.nade");
    }
    if (!options.checkpoint_prefix.empty() && options.checkpoint_every > 0 &&
        (e + 1) % options.checkpoint_every == 0)
      save_checkpoint(params, options.checkpoint_prefix + "_epoch" + std::to_string(e + 1) +
                                  ".nade");
    if (log.is_open()) {
      log << e << ',' << learning_rate(config, e) << ',' << train_loss << ',' << valid_loss << ','
          << secs << '\n';
      log.flush();
    }
  }
  if (!options.checkpoint_prefix.empty())
    save_checkpoint(params, options.checkpoint_prefix + "_final.nade");
  return result;
}

}  // namespace nadegsn
