#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nadegsn/data.hpp"
#include "nadegsn/model.hpp"

namespace nadegsn {

// Per-step noise p_t = max(p_min, p_max - (t-1)*(p_max-p_min)/(alpha*(T-1))).
struct AnnealSchedule {
  double p_max = 0.9;
  double p_min = 0.1;
  double alpha = 0.7;
  int T = 20;
};

void validate_schedule(const AnnealSchedule& s);

struct NoiseSpec {
  enum class Kind { fixed, annealed };
  Kind kind = Kind::fixed;
  double p = 0.5;            // fixed noise level
  AnnealSchedule schedule;   // annealed

  static NoiseSpec Fixed(double p) { return NoiseSpec{Kind::fixed, p, {}}; }
  static NoiseSpec Annealed(const AnnealSchedule& s) { return NoiseSpec{Kind::annealed, 0.0, s}; }
};

// How the resampled set is drawn each step. Default is independent
// per-coordinate Bernoulli(p); exact_fraction resamples exactly round(p*D)
// coordinates; single_coordinate is the Gibbs limit (one uniformly chosen
// coordinate, p ignored).
enum class ResampleLaw { bernoulli_per_coordinate, exact_fraction, single_coordinate };

enum class ChainInit { uniform_random, data_item };

struct ChainState {
  BinaryVector x;
  Rng rng;
  long steps_taken = 0;

  // reusable buffers, not part of the logical state
  ForwardTrace scratch;
  Mask keep_scratch;
};

ChainState make_chain(const ModelParams& params, std::uint64_t chain_seed);

struct SampleMeta {
  int chain = 0;
  long step = 0;    // steps_taken at emission (0 for ancestral samples)
  double noise = 0; // p at the emitting step (0 for ancestral, 1/D for Gibbs)
};

struct SampleSet {
  int D = 0;
  std::vector<BinaryVector> samples;
  std::vector<SampleMeta> meta;
};

// Exact i.i.d. model sample: uniform ordering, then one Bernoulli draw per
// coordinate along it. D forward passes.
BinaryVector ancestral_sample(const ModelParams& params, Rng& rng);
BinaryVector ancestral_sample(const ModelParams& params, Rng& rng, ForwardTrace& scratch);

// One GSN transition: draw the resample set, one forward pass with the kept
// set as mask, redraw resampled coordinates in parallel from their Bernoulli
// conditionals, copy kept coordinates verbatim.
void gsn_step(const ModelParams& params, ChainState& state, double p,
              ResampleLaw law = ResampleLaw::bernoulli_per_coordinate);

// The annealing formula; t must lie in [1, T]. T == 1 returns p_max.
double schedule_noise(const AnnealSchedule& s, int t);

// T gsn_steps at p_t for t = 1..T; emits the final x. Chain state carries
// over to the next run.
BinaryVector annealed_run(const ModelParams& params, ChainState& state, const AnnealSchedule& s,
                          ResampleLaw law = ResampleLaw::bernoulli_per_coordinate);

struct RunOptions {
  ResampleLaw law = ResampleLaw::bernoulli_per_coordinate;
  int workers = 1;
  const BinaryDataset* init_data = nullptr;  // required for ChainInit::data_item
};

// n_chains independent chains, chain c seeded from mix(seed, chain, c).
// Fixed noise: emit every thinning-th state. Annealed: one sample per
// annealed run, thinning counts runs. Output is ordered by chain id then
// step, independent of worker scheduling.
SampleSet run_chains(const ModelParams& params, int n_chains, int n_samples_per_chain,
                     long thinning, const NoiseSpec& noise, ChainInit init, std::uint64_t seed,
                     const RunOptions& options = {});

// n i.i.d. ancestral samples wrapped as a SampleSet (meta: chain = sample
// index, step = 0, noise = 0).
SampleSet ancestral_sample_set(const ModelParams& params, int n, std::uint64_t seed,
                               int workers = 1);

// Main file: "D n" header then one 0/1 string per sample. Sidecar CSV
// (optional): chain,step,p per sample.
void save_sample_set(const SampleSet& set, const std::string& path,
                     const std::string& meta_csv_path = "");
SampleSet load_sample_set(const std::string& path);

// Binary PGM "P5" grid (maxval 255): samples tiled with a 1-pixel separator;
// bit 1 -> 255, bit 0 -> 0, separator 128. Requires D == img_rows*img_cols.
void write_pgm_grid(const SampleSet& set, int img_rows, int img_cols, const std::string& path);

}  // namespace nadegsn
