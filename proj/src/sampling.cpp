#include "nadegsn/sampling.hpp"

#include <cstdio>
#include <fstream>
#include <thread>

namespace nadegsn {

void validate_schedule(const AnnealSchedule& s) {
  if (!(s.p_max >= 0.0 && s.p_max <= 1.0 && s.p_min >= 0.0 && s.p_min <= 1.0))
    raise(Errc::bad_config, "schedule noise levels must lie in [0,1]");
  if (!(s.p_max >= s.p_min)) raise(Errc::bad_config, "need p_max >= p_min");
  if (!(s.alpha > 0.0)) raise(Errc::bad_config, "need alpha > 0");
  if (s.T < 1) raise(Errc::bad_config, "need T >= 1");
}

ChainState make_chain(const ModelParams& params, std::uint64_t chain_seed) {
  ChainState state;
  state.rng = Rng(chain_seed);
  state.x.assign(static_cast<std::size_t>(params.D), 0);
  state.keep_scratch = Mask::zeros(params.D);
  return state;
}

BinaryVector ancestral_sample(const ModelParams& params, Rng& rng, ForwardTrace& scratch) {
  const int D = params.D;
  const Ordering ord = random_ordering(D, rng);
  BinaryVector x(static_cast<std::size_t>(D), 0);
  Mask mask = Mask::zeros(D);
  for (int d = 0; d < D; ++d) {
    conditionals_into(params, x, mask, scratch);
    const int i = ord.perm[static_cast<std::size_t>(d)];
    x[static_cast<std::size_t>(i)] =
        rng.bernoulli(scratch.probabilities[static_cast<std::size_t>(i)]) ? 1 : 0;
    mask.bits[static_cast<std::size_t>(i)] = 1;
  }
  return x;
}

BinaryVector ancestral_sample(const ModelParams& params, Rng& rng) {
  ForwardTrace scratch;
  return ancestral_sample(params, rng, scratch);
}

void gsn_step(const ModelParams& params, ChainState& state, double p, ResampleLaw law) {
  if (!(p >= 0.0 && p <= 1.0)) raise(Errc::bad_noise, "noise level must lie in [0,1]");
  const int D = params.D;
  if (static_cast<int>(state.x.size()) != D)
    raise(Errc::shape_mismatch, "chain state does not match model dimensionality");

  Mask& keep = state.keep_scratch;
  keep.bits.assign(static_cast<std::size_t>(D), 1);
  int n_resample = 0;
  switch (law) {
    case ResampleLaw::bernoulli_per_coordinate:
      for (int i = 0; i < D; ++i)
        if (state.rng.bernoulli(p)) {
          keep.bits[static_cast<std::size_t>(i)] = 0;
          ++n_resample;
        }
      break;
    case ResampleLaw::exact_fraction: {
      n_resample = static_cast<int>(std::lround(p * D));
      const Mask resample = random_subset_mask(D, n_resample, state.rng);
      for (int i = 0; i < D; ++i)
        keep.bits[static_cast<std::size_t>(i)] = resample.bits[static_cast<std::size_t>(i)] ? 0 : 1;
      break;
    }
    case ResampleLaw::single_coordinate: {
      const int i = static_cast<int>(state.rng.below(static_cast<std::uint64_t>(D)));
      keep.bits[static_cast<std::size_t>(i)] = 0;
      n_resample = 1;
      break;
    }
  }

  if (n_resample > 0) {
    conditionals_into(params, state.x, keep, state.scratch);
    for (int i = 0; i < D; ++i) {
      if (keep.bits[static_cast<std::size_t>(i)]) continue;
      state.x[static_cast<std::size_t>(i)] =
          state.rng.bernoulli(state.scratch.probabilities[static_cast<std::size_t>(i)]) ? 1 : 0;
    }
  }
  ++state.steps_taken;
}

double schedule_noise(const AnnealSchedule& s, int t) {
  validate_schedule(s);
  if (t < 1 || t > s.T) raise(Errc::bad_step, "t must lie in [1, T]");
  if (s.T == 1) return s.p_max;
  const double decrement =
      static_cast<double>(t - 1) * (s.p_max - s.p_min) / (s.alpha * (s.T - 1));
  return std::max(s.p_min, s.p_max - decrement);
}

BinaryVector annealed_run(const ModelParams& params, ChainState& state, const AnnealSchedule& s,
                          ResampleLaw law) {
  validate_schedule(s);
  for (int t = 1; t <= s.T; ++t) gsn_step(params, state, schedule_noise(s, t), law);
  return state.x;
}

namespace {

void init_chain_x(ChainState& state, const ModelParams& params, ChainInit init,
                  const BinaryDataset* data) {
  if (init == ChainInit::uniform_random) {
    for (auto& b : state.x) b = state.rng.bernoulli(0.5) ? 1 : 0;
    return;
  }
  if (data == nullptr || data->items.empty())
    raise(Errc::bad_config, "data_item initialization needs a non-empty dataset");
  if (data->D != params.D) raise(Errc::shape_mismatch, "init dataset D differs from model D");
  state.x = data->items[state.rng.below(data->items.size())];
}

// Samples for one chain, in emission order.
void run_one_chain(const ModelParams& params, int chain_id, int n_samples, long thinning,
                   const NoiseSpec& noise, ChainInit init, std::uint64_t seed,
                   const RunOptions& options, std::vector<BinaryVector>& samples,
                   std::vector<SampleMeta>& meta) {
  ChainState state =
      make_chain(params, mix_seed(seed, stream_tag::chain, static_cast<std::uint64_t>(chain_id)));
  init_chain_x(state, params, init, options.init_data);
  samples.reserve(static_cast<std::size_t>(n_samples));
  meta.reserve(static_cast<std::size_t>(n_samples));
  for (int k = 0; k < n_samples; ++k) {
    double emitted_noise = 0.0;
    if (noise.kind == NoiseSpec::Kind::fixed) {
      for (long t = 0; t < thinning; ++t) gsn_step(params, state, noise.p, options.law);
      emitted_noise = options.law == ResampleLaw::single_coordinate
                          ? 1.0 / static_cast<double>(params.D)
                          : noise.p;
    } else {
      for (long t = 0; t < thinning; ++t) annealed_run(params, state, noise.schedule, options.law);
      emitted_noise = schedule_noise(noise.schedule, noise.schedule.T);
    }
    samples.push_back(state.x);
    meta.push_back(SampleMeta{chain_id, state.steps_taken, emitted_noise});
  }
}

}  // namespace

SampleSet run_chains(const ModelParams& params, int n_chains, int n_samples_per_chain,
                     long thinning, const NoiseSpec& noise, ChainInit init, std::uint64_t seed,
                     const RunOptions& options) {
  if (n_chains < 1 || n_samples_per_chain < 1 || thinning < 1)
    raise(Errc::bad_config, "need n_chains, n_samples_per_chain, thinning >= 1");
  if (noise.kind == NoiseSpec::Kind::fixed) {
    if (!(noise.p >= 0.0 && noise.p <= 1.0)) raise(Errc::bad_noise, "p must lie in [0,1]");
  } else {
    validate_schedule(noise.schedule);
  }
  if (init == ChainInit::data_item && (options.init_data == nullptr || options.init_data->items.empty()))
    raise(Errc::bad_config, "data_item initialization needs a non-empty dataset");

  std::vector<std::vector<BinaryVector>> per_chain(static_cast<std::size_t>(n_chains));
  std::vector<std::vector<SampleMeta>> per_meta(static_cast<std::size_t>(n_chains));

  const int workers = std::max(1, std::min(options.workers, n_chains));
  if (workers == 1) {
    for (int c = 0; c < n_chains; ++c)
      run_one_chain(params, c, n_samples_per_chain, thinning, noise, init, seed, options,
                    per_chain[static_cast<std::size_t>(c)], per_meta[static_cast<std::size_t>(c)]);
  } else {
    // Each worker owns whole chains; chain c's RNG depends only on (seed, c),
    // so the merged output is identical to the workers=1 run.
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (int c = w; c < n_chains; c += workers)
            run_one_chain(params, c, n_samples_per_chain, thinning, noise, init, seed, options,
                          per_chain[static_cast<std::size_t>(c)],
                          per_meta[static_cast<std::size_t>(c)]);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SampleSet set;
  set.D = params.D;
  set.samples.reserve(static_cast<std::size_t>(n_chains) * n_samples_per_chain);
  set.meta.reserve(set.samples.capacity());
  for (int c = 0; c < n_chains; ++c) {
    auto& chain = per_chain[static_cast<std::size_t>(c)];
    auto& meta = per_meta[static_cast<std::size_t>(c)];
    std::move(chain.begin(), chain.end(), std::back_inserter(set.samples));
    set.meta.insert(set.meta.end(), meta.begin(), meta.end());
  }
  return set;
}

SampleSet ancestral_sample_set(const ModelParams& params, int n, std::uint64_t seed, int workers) {
  if (n < 1) raise(Errc::bad_config, "need n >= 1");
  SampleSet set;
  set.D = params.D;
  set.samples.resize(static_cast<std::size_t>(n));
  set.meta.resize(static_cast<std::size_t>(n));

  auto draw_range = [&](int begin, int stride) {
    ForwardTrace scratch;
    for (int i = begin; i < n; i += stride) {
      Rng rng(mix_seed(seed, stream_tag::sample, static_cast<std::uint64_t>(i)));
      set.samples[static_cast<std::size_t>(i)] = ancestral_sample(params, rng, scratch);
      set.meta[static_cast<std::size_t>(i)] = SampleMeta{i, 0, 0.0};
    }
  };

  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    draw_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(draw_range, w, workers);
    for (auto& t : pool) t.join();
  }
  return set;
}

void save_sample_set(const SampleSet& set, const std::string& path,
                     const std::string& meta_csv_path) {
  BinaryDataset view;
  view.D = set.D;
  view.items = set.samples;
  write_binary_dataset(view, path);
  if (meta_csv_path.empty()) return;
  std::ofstream out(meta_csv_path);
  if (!out) raise(Errc::not_found, "cannot write " + meta_csv_path);
  out << "chain,step,p\n";
  char buf[64];
  for (const auto& m : set.meta) {
    std::snprintf(buf, sizeof(buf), "%d,%ld,%.10g\n", m.chain, m.step, m.noise);
    out << buf;
  }
}

SampleSet load_sample_set(const std::string& path) {
  BinaryDataset ds = load_binary_dataset(path);
  SampleSet set;
  set.D = ds.D;
  set.samples = std::move(ds.items);
  set.meta.assign(set.samples.size(), SampleMeta{});
  for (std::size_t i = 0; i < set.meta.size(); ++i) set.meta[i].chain = static_cast<int>(i);
  return set;
}

void write_pgm_grid(const SampleSet& set, int img_rows, int img_cols, const std::string& path) {
  if (img_rows < 1 || img_cols < 1 || img_rows * img_cols != set.D)
    raise(Errc::shape_mismatch, "PGM grid needs img_rows*img_cols == D");
  if (set.samples.empty()) raise(Errc::empty_set, "no samples to render");
  const int n = static_cast<int>(set.samples.size());
  int grid_cols = 1;
  while (grid_cols * grid_cols < n) ++grid_cols;
  const int grid_rows = (n + grid_cols - 1) / grid_cols;

  const int width = grid_cols * (img_cols + 1) + 1;
  const int height = grid_rows * (img_rows + 1) + 1;
  std::vector<std::uint8_t> canvas(static_cast<std::size_t>(width) * height, 128);

  for (int k = 0; k < n; ++k) {
    const int gr = k / grid_cols, gc = k % grid_cols;
    const int y0 = gr * (img_rows + 1) + 1, x0 = gc * (img_cols + 1) + 1;
    const BinaryVector& s = set.samples[static_cast<std::size_t>(k)];
    for (int r = 0; r < img_rows; ++r)
      for (int c = 0; c < img_cols; ++c)
        canvas[static_cast<std::size_t>(y0 + r) * width + (x0 + c)] =
            s[static_cast<std::size_t>(r) * img_cols + c] ? 255 : 0;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::not_found, "cannot write " + path);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(canvas.data()),
            static_cast<std::streamsize>(canvas.size()));
}

}  // namespace nadegsn
