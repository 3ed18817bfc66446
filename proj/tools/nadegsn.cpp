// nadegsn: train deep order-agnostic NADE models of binary data and sample
// from them by exact ancestral sampling or by the GSN Markov chain (fixed or
// annealed noise), with evaluation, benchmarking, and small-D oracle checks.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "nadegsn/data.hpp"
#include "nadegsn/diagnostics.hpp"
#include "nadegsn/model.hpp"
#include "nadegsn/sampling.hpp"
#include "nadegsn/training.hpp"

using namespace nadegsn;

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOptions {
  std::string images, labels;
  bool synthetic = false;
  int dim = 64;
  int n_prototypes = 4;
  double flip_prob = 0.05;
  int downsample_factor = 1;
  int n_train = -1;
  int n_valid = 0;
  std::uint64_t seed = 0;
  std::string out_prefix;
};

int cmd_ingest(const IngestOptions& opt) {
  BinaryDataset all;
  if (opt.synthetic) {
    if (opt.n_train < 0) raise(Errc::bad_config, "synthetic mode needs --n-train");
    Rng proto_rng(mix_seed(opt.seed, stream_tag::init, 1));
    std::vector<BinaryVector> protos(static_cast<std::size_t>(opt.n_prototypes));
    for (auto& p : protos) {
      p.resize(static_cast<std::size_t>(opt.dim));
      for (auto& b : p) b = proto_rng.bernoulli(0.5) ? 1 : 0;
    }
    all = synthetic_prototypes(opt.dim, protos, opt.flip_prob, opt.n_train + opt.n_valid,
                               opt.seed);
  } else {
    if (opt.images.empty()) raise(Errc::bad_config, "need --images or --synthetic");
    RawImageSet raw = load_idx_images(opt.images);
    if (!opt.labels.empty()) (void)load_idx_labels(opt.labels);  // accepted, unused
    if (opt.downsample_factor > 1) raw = downsample(raw, opt.downsample_factor);
    all = binarize(raw);
    if (opt.n_train < 0) raise(Errc::bad_config, "need --n-train");
  }

  auto [train, valid] = split(all, opt.n_train, opt.n_valid);
  write_binary_dataset(train, opt.out_prefix + "_train.txt");
  write_binary_dataset(valid, opt.out_prefix + "_valid.txt");
  std::cout << "train=" << train.items.size() << " valid=" << valid.items.size()
            << " D=" << all.D << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainCliOptions {
  std::string data, valid_path;
  int hidden = 128;
  int layers = 2;
  std::string activation = "rectifier";
  TrainConfig config;
  int valid_draws = 1;
  std::string ckpt_prefix;
  std::string log_path;
  int ckpt_every = 0;
};

int cmd_train(const TrainCliOptions& opt) {
  const BinaryDataset train = load_binary_dataset(opt.data);
  const BinaryDataset valid = load_binary_dataset(opt.valid_path);
  if (train.items.empty()) raise(Errc::empty_dataset, "training set is empty");
  if (valid.D != train.D) raise(Errc::shape_mismatch, "train and valid dimensionality differ");

  ModelParams params = init_params(train.D, opt.hidden, opt.layers,
                                   activation_from_name(opt.activation), opt.config.seed);
  std::cout << "config: D=" << train.D << " H=" << opt.hidden << " L=" << opt.layers
            << " activation=" << opt.activation << " epochs=" << opt.config.epochs
            << " lr=" << fmt(opt.config.lr_start) << "->" << fmt(opt.config.lr_end)
            << " batch=" << opt.config.batch_size << " shuffle=" << opt.config.shuffle
            << " seed=" << opt.config.seed << "\n";

  FitOptions fit_opts;
  fit_opts.log_path = opt.log_path;
  fit_opts.checkpoint_prefix = opt.ckpt_prefix;
  fit_opts.checkpoint_every = opt.ckpt_every;
  fit_opts.valid_draws = opt.valid_draws;
  const FitResult result = fit(params, train, valid, opt.config, fit_opts);

  std::cout << "best_epoch=" << result.best_epoch
            << " best_valid_loss=" << fmt(result.best_valid_loss) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sample

struct SampleCliOptions {
  std::string ckpt;
  std::string mode = "ancestral";
  int n = 1000;
  double p = 0.5;
  AnnealSchedule schedule;
  int chains = 100;
  int per_chain = 10;
  long thin = 1;
  std::string law = "bernoulli";
  std::string init = "uniform";
  std::string init_data_path;
  int workers = 1;
  std::uint64_t seed = 0;
  std::string out_prefix;
  std::string pgm_path;
  int img_rows = 0, img_cols = 0;
};

ResampleLaw law_from_name(const std::string& name) {
  if (name == "bernoulli") return ResampleLaw::bernoulli_per_coordinate;
  if (name == "exact-fraction") return ResampleLaw::exact_fraction;
  raise(Errc::bad_config, "unknown resample law '" + name + "'");
}

int cmd_sample(const SampleCliOptions& opt) {
  const ModelParams params = load_checkpoint(opt.ckpt);

  BinaryDataset init_data;
  RunOptions run_opts;
  run_opts.law = law_from_name(opt.law);
  run_opts.workers = opt.workers;
  ChainInit init = ChainInit::uniform_random;
  if (opt.init == "data") {
    if (opt.init_data_path.empty()) raise(Errc::bad_config, "init=data needs --init-data");
    init_data = load_binary_dataset(opt.init_data_path);
    run_opts.init_data = &init_data;
    init = ChainInit::data_item;
  } else if (opt.init != "uniform") {
    raise(Errc::bad_config, "unknown init mode '" + opt.init + "'");
  }

  SampleSet set;
  if (opt.mode == "ancestral") {
    set = ancestral_sample_set(params, opt.n, opt.seed, opt.workers);
  } else if (opt.mode == "fixed") {
    set = run_chains(params, opt.chains, opt.per_chain, opt.thin, NoiseSpec::Fixed(opt.p), init,
                     opt.seed, run_opts);
  } else if (opt.mode == "annealed") {
    set = run_chains(params, opt.chains, opt.per_chain, opt.thin,
                     NoiseSpec::Annealed(opt.schedule), init, opt.seed, run_opts);
  } else if (opt.mode == "gibbs") {
    run_opts.law = ResampleLaw::single_coordinate;
    set = run_chains(params, opt.chains, opt.per_chain, opt.thin, NoiseSpec::Fixed(0.0), init,
                     opt.seed, run_opts);
  } else {
    raise(Errc::bad_config, "unknown mode '" + opt.mode + "'");
  }

  save_sample_set(set, opt.out_prefix + ".txt", opt.out_prefix + "_meta.csv");
  if (!opt.pgm_path.empty()) {
    int rows = opt.img_rows, cols = opt.img_cols;
    if (rows == 0 || cols == 0) {
      const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(params.D))));
      if (side * side != params.D)
        raise(Errc::bad_config, "D is not square; pass --img-rows/--img-cols for the PGM grid");
      rows = cols = side;
    }
    write_pgm_grid(set, rows, cols, opt.pgm_path);
  }
  std::cout << "samples=" << set.samples.size() << " D=" << set.D << " mode=" << opt.mode << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalCliOptions {
  std::string ckpt;
  std::vector<std::string> sample_files;
  int n_orderings = 1;
  std::uint64_t seed = 0;
  std::string out_csv;
};

int cmd_eval(const EvalCliOptions& opt) {
  const ModelParams params = load_checkpoint(opt.ckpt);
  std::ofstream csv;
  if (!opt.out_csv.empty()) {
    csv.open(opt.out_csv);
    if (!csv) raise(Errc::not_found, "cannot write " + opt.out_csv);
    csv << "file,n_samples,n_orderings,mean_log_prob\n";
  }
  for (const auto& file : opt.sample_files) {
    const SampleSet set = load_sample_set(file);
    const double mlp = mean_log_prob(params, set, opt.n_orderings, opt.seed);
    std::cout << file << " n=" << set.samples.size() << " mean_log_prob=" << fmt(mlp) << "\n";
    if (csv.is_open())
      csv << file << ',' << set.samples.size() << ',' << opt.n_orderings << ',' << fmt(mlp)
          << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchCliOptions {
  std::string ckpt;
  int reps = 100;
  double p = 0.5;
  std::vector<double> alphas = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  AnnealSchedule schedule;  // p_max/p_min/T shared across the alpha sweep
  long thin = 1;
  int bench_samples = 200;
  int n_orderings = 1;
  std::uint64_t seed = 0;
  std::string out_csv;
};

int cmd_bench(const BenchCliOptions& opt) {
  const ModelParams params = load_checkpoint(opt.ckpt);

  // single-process wall-clock timing of both samplers
  const double t_anc = time_ancestral_per_sample(params, opt.reps, opt.seed);
  const double t_step = time_gsn_per_step(params, opt.reps, opt.p, opt.seed);
  std::cout << "t_ancestral_per_sample=" << fmt(t_anc) << "s t_gsn_per_step=" << fmt(t_step)
            << "s raw_factor=" << fmt(t_anc / t_step) << "\n";

  std::ofstream csv;
  if (!opt.out_csv.empty()) {
    csv.open(opt.out_csv);
    if (!csv) raise(Errc::not_found, "cannot write " + opt.out_csv);
    csv << "mode,p_or_alpha,T,thin,steps_per_sample,n_samples,mean_log_prob,ess,ess_fraction,"
           "raw_factor,effective_factor,t_ancestral_seconds,t_gsn_step_seconds\n";
  }

  for (double alpha : opt.alphas) {
    AnnealSchedule s = opt.schedule;
    s.alpha = alpha;
    validate_schedule(s);
    const SampleSet set = run_chains(params, 1, opt.bench_samples, opt.thin,
                                     NoiseSpec::Annealed(s), ChainInit::uniform_random, opt.seed);
    const double mlp = mean_log_prob(params, set, opt.n_orderings, opt.seed);
    const Series series = log_prob_series(params, set.samples, opt.n_orderings, opt.seed);
    double ess;
    try {
      ess = effective_sample_size(series);
    } catch (const Error& e) {
      if (e.code() != Errc::zero_variance) throw;
      ess = static_cast<double>(set.samples.size());
    }
    const double ess_fraction = ess / static_cast<double>(set.samples.size());
    const long steps_per_sample = static_cast<long>(s.T) * opt.thin;
    const SpeedupReport report = speedup_report(t_anc, t_step, steps_per_sample, ess_fraction);

    std::cout << "alpha=" << fmt(alpha) << " mean_log_prob=" << fmt(mlp) << " ess=" << fmt(ess)
              << " effective_factor=" << fmt(report.effective_factor) << "\n";
    if (csv.is_open())
      csv << "annealed," << fmt(alpha) << ',' << s.T << ',' << opt.thin << ','
          << steps_per_sample << ',' << set.samples.size() << ',' << fmt(mlp) << ',' << fmt(ess)
          << ',' << fmt(ess_fraction) << ',' << fmt(report.raw_factor) << ','
          << fmt(report.effective_factor) << ',' << fmt(t_anc) << ',' << fmt(t_step) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleCliOptions {
  std::string ckpt;
  int dim = 3;
  int hidden = 6;
  int layers = 2;
  std::string activation = "rectifier";
  std::uint64_t model_seed = 0;
  double p = 0.5;
  long steps = 200000;
  double tv_tol = 0.02;
  std::uint64_t seed = 0;
};

int cmd_oracle(const OracleCliOptions& opt) {
  ModelParams params = opt.ckpt.empty()
                           ? init_params(opt.dim, opt.hidden, opt.layers,
                                         activation_from_name(opt.activation), opt.model_seed)
                           : load_checkpoint(opt.ckpt);
  if (params.D > 12) raise(Errc::too_large, "oracle checks are guarded to D <= 12");

  int failures = 0;
  auto report = [&failures](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << " " << detail << "\n";
    if (!pass) ++failures;
  };

  {
    Rng rng(mix_seed(opt.seed, stream_tag::ordering, 0));
    const ExactDistribution dist = enumerate_fixed_order(params, random_ordering(params.D, rng));
    const double total =
        std::accumulate(dist.probabilities.begin(), dist.probabilities.end(), 0.0);
    report("normalization", std::abs(total - 1.0) < 1e-8,
           "|sum-1|=" + fmt(std::abs(total - 1.0)) + " (tol 1e-8)");
  }

  const TransitionMatrix matrix = exact_transition_matrix(params, opt.p);
  {
    double worst_row = 0.0, min_entry = 1.0;
    for (int i = 0; i < matrix.n_states; ++i) {
      double row = 0.0;
      for (int j = 0; j < matrix.n_states; ++j) {
        row += matrix.at(i, j);
        min_entry = std::min(min_entry, matrix.at(i, j));
      }
      worst_row = std::max(worst_row, std::abs(row - 1.0));
    }
    report("transition-rows", worst_row < 1e-10, "max|row-1|=" + fmt(worst_row) + " (tol 1e-10)");
    report("transition-positivity", min_entry > 0.0, "min_entry=" + fmt(min_entry));
  }

  {
    const StationaryResult st = stationary_distribution(matrix);
    SampleSet chain = run_chains(params, 1, static_cast<int>(opt.steps), 1, NoiseSpec::Fixed(opt.p),
                                 ChainInit::uniform_random, opt.seed);
    const std::vector<double> hist = state_histogram(chain.samples, params.D);
    const double tv = tv_distance(hist, st.dist.probabilities);
    report("stationarity", tv < opt.tv_tol,
           "TV=" + fmt(tv) + " (tol " + fmt(opt.tv_tol) + ", " + std::to_string(opt.steps) +
               " steps)");
  }

  {
    // gradient check at a generic point: a fresh model has zero biases, which
    // parks rectifier pre-activations exactly on the kink for empty masks
    ModelParams probe = params;
    Rng jitter(mix_seed(opt.seed, stream_tag::init, 2));
    for (auto& layer : probe.hidden_biases)
      for (auto& b : layer) b += jitter.uniform(-0.3, 0.3);
    for (auto& b : probe.output_biases) b += jitter.uniform(-0.3, 0.3);

    Rng rng(mix_seed(opt.seed, stream_tag::sample, 3));
    std::vector<MaskedExample> batch;
    for (int k = 0; k < 3; ++k) {
      BinaryVector x(static_cast<std::size_t>(probe.D));
      for (auto& b : x) b = rng.bernoulli(0.5);
      batch.push_back(sample_masked_example(x, probe.D, rng));
    }
    const Gradient grad = oa_grad(probe, batch);
    const double step = 1e-5;
    double max_rel = 0.0;
    auto batch_loss = [&]() {
      double acc = 0.0;
      for (const auto& ex : batch) acc += oa_loss(probe, ex);
      return acc / static_cast<double>(batch.size());
    };
    auto fd_all = [&](std::vector<double>& theta, const std::vector<double>& g) {
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double keep = theta[i];
        theta[i] = keep + step;
        const double up = batch_loss();
        theta[i] = keep - step;
        const double down = batch_loss();
        theta[i] = keep;
        const double fd = (up - down) / (2.0 * step);
        max_rel = std::max(max_rel, std::abs(fd - g[i]) /
                                        std::max({std::abs(fd), std::abs(g[i]), 1e-4}));
      }
    };
    fd_all(probe.input_weights, grad.input_weights);
    for (std::size_t l = 0; l < probe.hidden_weights.size(); ++l)
      fd_all(probe.hidden_weights[l], grad.hidden_weights[l]);
    for (std::size_t l = 0; l < probe.hidden_biases.size(); ++l)
      fd_all(probe.hidden_biases[l], grad.hidden_biases[l]);
    fd_all(probe.output_weights, grad.output_weights);
    fd_all(probe.output_biases, grad.output_biases);
    report("gradient-check", max_rel < 1e-4, "max_rel_err=" + fmt(max_rel) + " (tol 1e-4)");
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deep order-agnostic NADE density estimation with GSN chain sampling"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key = value file (sections per subcommand)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  IngestOptions ingest;
  auto* cmd_in = app.add_subcommand("ingest", "load or generate binary data and write splits");
  cmd_in->configurable();
  cmd_in->add_option("--images", ingest.images, "IDX image file");
  cmd_in->add_option("--labels", ingest.labels, "IDX label file (accepted, unused)");
  cmd_in->add_flag("--synthetic", ingest.synthetic, "generate prototype data instead of loading");
  cmd_in->add_option("--dim", ingest.dim, "synthetic dimensionality")->check(CLI::PositiveNumber);
  cmd_in->add_option("--n-prototypes", ingest.n_prototypes, "synthetic prototype count")
      ->check(CLI::PositiveNumber);
  cmd_in->add_option("--flip-prob", ingest.flip_prob, "synthetic per-bit flip probability")
      ->check(CLI::Range(0.0, 0.499999));
  cmd_in->add_option("--downsample", ingest.downsample_factor, "block-average factor")
      ->check(CLI::PositiveNumber);
  cmd_in->add_option("--n-train", ingest.n_train, "training item count")
      ->check(CLI::NonNegativeNumber);
  cmd_in->add_option("--n-valid", ingest.n_valid, "validation item count")
      ->check(CLI::NonNegativeNumber);
  cmd_in->add_option("--seed", ingest.seed, "generator seed");
  cmd_in->add_option("--out-prefix", ingest.out_prefix, "output path prefix")->required();

  TrainCliOptions train;
  auto* cmd_tr = app.add_subcommand("train", "order-agnostic SGD training");
  cmd_tr->configurable();
  cmd_tr->add_option("--data", train.data, "training set file")->required();
  cmd_tr->add_option("--valid", train.valid_path, "validation set file")->required();
  cmd_tr->add_option("--hidden", train.hidden, "hidden width H")->check(CLI::PositiveNumber);
  cmd_tr->add_option("--layers", train.layers, "hidden layer count L")->check(CLI::PositiveNumber);
  cmd_tr->add_option("--activation", train.activation, "rectifier|sigmoid|tanh");
  cmd_tr->add_option("--epochs", train.config.epochs, "epoch count")->check(CLI::PositiveNumber);
  cmd_tr->add_option("--lr-start", train.config.lr_start, "initial learning rate")
      ->check(CLI::NonNegativeNumber);
  cmd_tr->add_option("--lr-end", train.config.lr_end, "final learning rate")
      ->check(CLI::NonNegativeNumber);
  cmd_tr->add_option("--batch-size", train.config.batch_size, "minibatch size")
      ->check(CLI::PositiveNumber);
  cmd_tr->add_option("--seed", train.config.seed, "training seed");
  cmd_tr->add_flag("!--no-shuffle", train.config.shuffle, "disable per-epoch shuffling");
  cmd_tr->add_option("--valid-draws", train.valid_draws, "masked draws per validation item")
      ->check(CLI::PositiveNumber);
  cmd_tr->add_option("--ckpt-prefix", train.ckpt_prefix, "checkpoint path prefix")->required();
  cmd_tr->add_option("--log", train.log_path, "per-epoch CSV log path");
  cmd_tr->add_option("--ckpt-every", train.ckpt_every, "periodic checkpoint interval (0=off)")
      ->check(CLI::NonNegativeNumber);

  SampleCliOptions sample;
  auto* cmd_sa = app.add_subcommand("sample", "draw samples from a checkpoint");
  cmd_sa->configurable();
  cmd_sa->add_option("--ckpt", sample.ckpt, "model checkpoint")->required();
  cmd_sa->add_option("--mode", sample.mode, "ancestral|fixed|annealed|gibbs")->required();
  cmd_sa->add_option("--n", sample.n, "ancestral sample count")->check(CLI::PositiveNumber);
  cmd_sa->add_option("--p", sample.p, "fixed noise level")->check(CLI::Range(0.0, 1.0));
  cmd_sa->add_option("--p-max", sample.schedule.p_max, "annealed start noise")
      ->check(CLI::Range(0.0, 1.0));
  cmd_sa->add_option("--p-min", sample.schedule.p_min, "annealed target noise")
      ->check(CLI::Range(0.0, 1.0));
  cmd_sa->add_option("--alpha", sample.schedule.alpha, "fraction of the run spent annealing");
  cmd_sa->add_option("--steps-per-run", sample.schedule.T, "annealing run length T")
      ->check(CLI::PositiveNumber);
  cmd_sa->add_option("--chains", sample.chains, "parallel chain count")
      ->check(CLI::PositiveNumber);
  cmd_sa->add_option("--per-chain", sample.per_chain, "samples emitted per chain")
      ->check(CLI::PositiveNumber);
  cmd_sa->add_option("--thin", sample.thin, "steps (or runs) between emissions")
      ->check(CLI::PositiveNumber);
  cmd_sa->add_option("--law", sample.law, "bernoulli|exact-fraction");
  cmd_sa->add_option("--init", sample.init, "uniform|data");
  cmd_sa->add_option("--init-data", sample.init_data_path, "dataset for init=data");
  cmd_sa->add_option("--workers", sample.workers, "worker threads over chains")
      ->check(CLI::PositiveNumber);
  cmd_sa->add_option("--seed", sample.seed, "sampling seed");
  cmd_sa->add_option("--out-prefix", sample.out_prefix, "output path prefix")->required();
  cmd_sa->add_option("--pgm", sample.pgm_path, "also write a PGM grid here");
  cmd_sa->add_option("--img-rows", sample.img_rows, "PGM cell rows");
  cmd_sa->add_option("--img-cols", sample.img_cols, "PGM cell cols");

  EvalCliOptions eval;
  auto* cmd_ev = app.add_subcommand("eval", "mean model log-probability of sample files");
  cmd_ev->configurable();
  cmd_ev->add_option("--ckpt", eval.ckpt, "model checkpoint")->required();
  cmd_ev->add_option("--samples", eval.sample_files, "sample files")->required()->expected(-1);
  cmd_ev->add_option("--n-orderings", eval.n_orderings, "orderings per ensemble average")
      ->check(CLI::PositiveNumber);
  cmd_ev->add_option("--seed", eval.seed, "evaluation seed");
  cmd_ev->add_option("--out", eval.out_csv, "CSV report path");

  BenchCliOptions bench;
  auto* cmd_be = app.add_subcommand("bench", "timing + ESS-discounted speedup sweep");
  cmd_be->configurable();
  cmd_be->add_option("--ckpt", bench.ckpt, "model checkpoint")->required();
  cmd_be->add_option("--reps", bench.reps, "timing repetitions")->check(CLI::Range(1, 1000000));
  cmd_be->add_option("--p", bench.p, "noise level for step timing")->check(CLI::Range(0.0, 1.0));
  cmd_be->add_option("--alphas", bench.alphas, "annealing fractions to sweep")->expected(-1);
  cmd_be->add_option("--p-max", bench.schedule.p_max, "sweep start noise")
      ->check(CLI::Range(0.0, 1.0));
  cmd_be->add_option("--p-min", bench.schedule.p_min, "sweep target noise")
      ->check(CLI::Range(0.0, 1.0));
  cmd_be->add_option("--steps-per-run", bench.schedule.T, "annealing run length T")
      ->check(CLI::PositiveNumber);
  cmd_be->add_option("--thin", bench.thin, "runs between emissions")->check(CLI::PositiveNumber);
  cmd_be->add_option("--bench-samples", bench.bench_samples, "samples per sweep point")
      ->check(CLI::PositiveNumber);
  cmd_be->add_option("--n-orderings", bench.n_orderings, "orderings for the log-prob statistic")
      ->check(CLI::PositiveNumber);
  cmd_be->add_option("--seed", bench.seed, "sweep seed");
  cmd_be->add_option("--out", bench.out_csv, "CSV report path");

  OracleCliOptions oracle;
  auto* cmd_or = app.add_subcommand("oracle", "small-D exactness checks (D <= 12)");
  cmd_or->configurable();
  cmd_or->add_option("--ckpt", oracle.ckpt, "checkpoint to check (else a random model)");
  cmd_or->add_option("--dim", oracle.dim, "random model D")->check(CLI::Range(1, 12));
  cmd_or->add_option("--hidden", oracle.hidden, "random model H")->check(CLI::PositiveNumber);
  cmd_or->add_option("--layers", oracle.layers, "random model L")->check(CLI::PositiveNumber);
  cmd_or->add_option("--activation", oracle.activation, "random model activation");
  cmd_or->add_option("--model-seed", oracle.model_seed, "random model seed");
  cmd_or->add_option("--p", oracle.p, "chain noise level")->check(CLI::Range(0.0, 1.0));
  cmd_or->add_option("--steps", oracle.steps, "chain length for the stationarity check")
      ->check(CLI::PositiveNumber);
  cmd_or->add_option("--tv-tol", oracle.tv_tol, "stationarity TV tolerance")
      ->check(CLI::PositiveNumber);
  cmd_or->add_option("--seed", oracle.seed, "oracle seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_in->parsed()) return cmd_ingest(ingest);
    if (cmd_tr->parsed()) return cmd_train(train);
    if (cmd_sa->parsed()) return cmd_sample(sample);
    if (cmd_ev->parsed()) return cmd_eval(eval);
    if (cmd_be->parsed()) return cmd_bench(bench);
    if (cmd_or->parsed()) return cmd_oracle(oracle);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
