#pragma once

#include <cstdint>
#include <vector>

#include "nadegsn/model.hpp"
#include "nadegsn/sampling.hpp"

namespace nadegsn {

// Ordered scalar summaries of a chain, e.g. per-sample log-probability.
struct Series {
  std::vector<double> values;
};

struct SpeedupReport {
  double t_ancestral_per_sample = 0;
  double t_gsn_per_step = 0;
  long steps_per_emitted_sample = 1;
  double ess_fraction = 1.0;
  double raw_factor = 0;        // t_ancestral / t_gsn_step
  double effective_factor = 0;  // raw / steps * ess_fraction
};

// Probabilities over all 2^D states; state s has bit i = (s >> i) & 1.
struct ExactDistribution {
  int D = 0;
  std::vector<double> probabilities;
};

// Row-stochastic transition matrix over 2^D states, row-major.
struct TransitionMatrix {
  int n_states = 0;
  std::vector<double> p;

  double& at(int from, int to) { return p[static_cast<std::size_t>(from) * n_states + to]; }
  double at(int from, int to) const { return p[static_cast<std::size_t>(from) * n_states + to]; }
};

// Mean log_likelihood_ensemble over the sample set; sample i uses the
// substream mix(seed, sample, i). Throws EmptySet.
double mean_log_prob(const ModelParams& params, const SampleSet& samples, int n_orderings,
                     std::uint64_t seed);

// Per-sample log-probability series in emission order (the default ESS
// statistic).
Series log_prob_series(const ModelParams& params, const std::vector<BinaryVector>& samples,
                       int n_orderings, std::uint64_t seed);

// rho_k = C(k)/C(0) with C(k) the biased (1/N) autocovariance; returns
// lags 0..max_lag with rho_0 = 1. Throws ZeroVariance, TooShort.
std::vector<double> autocorrelation(const Series& s, int max_lag);

// N / (1 + 2 * sum rho_k), truncated before the first lag pair (2j, 2j+1)
// whose autocorrelation sum is nonpositive (Geyer's initial positive
// sequence). Clamped to [1, N].
double effective_sample_size(const Series& s);

// Per-chain ESS of the log-probability statistic, summed over chains,
// divided by the total emitted samples. Chains whose statistic series is
// constant contribute their full length.
double ess_fraction_by_chain(const ModelParams& params, const SampleSet& set, int n_orderings,
                             std::uint64_t seed);

// raw_factor = t_ancestral / t_gsn_step; effective_factor = raw / steps *
// ess_fraction. Throws BadInput on nonpositive times or ess_fraction outside
// (0, 1].
SpeedupReport speedup_report(double t_ancestral, double t_gsn_step,
                             long steps_per_emitted_sample, double ess_fraction);

// p(x) for every configuration via log_likelihood_fixed_order; D <= 16.
ExactDistribution enumerate_fixed_order(const ModelParams& params, const Ordering& ordering);

// Exact average over all D! orderings of the per-ordering distribution
// (the ancestral sampling distribution); D <= 8.
ExactDistribution enumerate_all_orders(const ModelParams& params);

// Entry (x -> x') summed over all 2^D keep-masks: per-variable Bernoulli
// keep probability 1-p, kept coordinates copied, resampled coordinates drawn
// from the masked conditionals. D <= 12.
TransitionMatrix exact_transition_matrix(const ModelParams& params, double p);

struct StationaryResult {
  ExactDistribution dist;
  long iterations = 0;
  double residual = 0;              // || pi M - pi ||_1 at the fixed point
  bool degenerate_identity = false; // identity operator: every distribution is stationary
};

// Power iteration from uniform until successive-iterate TV < 1e-12 (at most
// 1e5 iterations, else NoConvergence). An identity matrix reports the
// uniform fixed point with the degeneracy flag set.
StationaryResult stationary_distribution(const TransitionMatrix& matrix);

// 0.5 * sum |a_i - b_i|; inputs must share support size.
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

// Empirical distribution of packed states (bit i of the state = x_i).
std::vector<double> state_histogram(const std::vector<BinaryVector>& samples, int D);

// Wall-clock timing over `reps` repetitions after warmup, single thread.
double time_ancestral_per_sample(const ModelParams& params, int reps, std::uint64_t seed);
double time_gsn_per_step(const ModelParams& params, int reps, double p, std::uint64_t seed);

}  // namespace nadegsn
