#include "nadegsn/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace nadegsn {

double mean_log_prob(const ModelParams& params, const SampleSet& samples, int n_orderings,
                     std::uint64_t seed) {
  if (samples.samples.empty()) raise(Errc::empty_set, "no samples to evaluate");
  if (samples.D != params.D) raise(Errc::shape_mismatch, "sample D differs from model D");
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.samples.size(); ++i)
    acc += log_likelihood_ensemble(params, samples.samples[i], n_orderings,
                                   mix_seed(seed, stream_tag::sample, i));
  return acc / static_cast<double>(samples.samples.size());
}

Series log_prob_series(const ModelParams& params, const std::vector<BinaryVector>& samples,
                       int n_orderings, std::uint64_t seed) {
  Series s;
  s.values.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    s.values.push_back(log_likelihood_ensemble(params, samples[i], n_orderings,
                                               mix_seed(seed, stream_tag::sample, i)));
  return s;
}

namespace {

struct CenteredSeries {
  std::vector<double> centered;
  double c0 = 0.0;  // biased variance
};

CenteredSeries center(const Series& s) {
  const std::size_t n = s.values.size();
  double mean = 0.0;
  for (double v : s.values) mean += v;
  mean /= static_cast<double>(n);
  CenteredSeries c;
  c.centered.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.centered[i] = s.values[i] - mean;
    c.c0 += c.centered[i] * c.centered[i];
  }
  c.c0 /= static_cast<double>(n);
  return c;
}

// Biased (1/N) autocovariance at lag k over a centered series.
double autocov(const std::vector<double>& centered, int k) {
  const std::size_t n = centered.size();
  double acc = 0.0;
  for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t)
    acc += centered[t] * centered[t + static_cast<std::size_t>(k)];
  return acc / static_cast<double>(n);
}

}  // namespace

std::vector<double> autocorrelation(const Series& s, int max_lag) {
  const int n = static_cast<int>(s.values.size());
  if (max_lag < 1 || n <= max_lag) raise(Errc::too_short, "need series length > max_lag >= 1");
  const CenteredSeries c = center(s);
  if (c.c0 <= 0.0) raise(Errc::zero_variance, "constant series has no autocorrelation");
  std::vector<double> rho(static_cast<std::size_t>(max_lag) + 1);
  rho[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) rho[static_cast<std::size_t>(k)] = autocov(c.centered, k) / c.c0;
  return rho;
}

double effective_sample_size(const Series& s) {
  const int n = static_cast<int>(s.values.size());
  if (n < 2) raise(Errc::too_short, "need at least two points");
  const CenteredSeries c = center(s);
  if (c.c0 <= 0.0) raise(Errc::zero_variance, "constant series has no autocorrelation");

  // Geyer initial positive sequence: accumulate rho over lag pairs
  // (0,1), (2,3), ... while each pair sum stays positive. Lags are computed
  // lazily so long series stay O(N * truncation); a hard lag cap keeps
  // adversarial series (alternating signs leave every pair barely positive)
  // from scanning all N lags.
  const int lag_cap = std::min(n - 1, 2000);
  double rho_sum = 0.0;  // sum of rho_k for k >= 1 over included pairs
  for (int j = 0;; ++j) {
    const int k0 = 2 * j, k1 = 2 * j + 1;
    if (k1 > lag_cap) break;
    const double r0 = j == 0 ? 1.0 : autocov(c.centered, k0) / c.c0;
    const double r1 = autocov(c.centered, k1) / c.c0;
    if (r0 + r1 <= 0.0) break;
    rho_sum += (j == 0 ? 0.0 : r0) + r1;
  }
  const double tau = 1.0 + 2.0 * rho_sum;
  double ess = static_cast<double>(n) / tau;
  if (!(tau > 0.0)) ess = static_cast<double>(n);
  return std::clamp(ess, 1.0, static_cast<double>(n));
}

double ess_fraction_by_chain(const ModelParams& params, const SampleSet& set, int n_orderings,
                             std::uint64_t seed) {
  if (set.samples.empty()) raise(Errc::empty_set, "no samples");
  const Series all = log_prob_series(params, set.samples, n_orderings, seed);
  std::map<int, Series> by_chain;
  for (std::size_t i = 0; i < set.samples.size(); ++i)
    by_chain[set.meta[i].chain].values.push_back(all.values[i]);
  double ess_sum = 0.0;
  for (const auto& [chain, series] : by_chain) {
    const std::size_t len = series.values.size();
    if (len < 2) {
      ess_sum += static_cast<double>(len);
      continue;
    }
    try {
      ess_sum += effective_sample_size(series);
    } catch (const Error& e) {
      if (e.code() != Errc::zero_variance) throw;
      ess_sum += static_cast<double>(len);  // constant statistic: no evidence of correlation
    }
  }
  return ess_sum / static_cast<double>(set.samples.size());
}

SpeedupReport speedup_report(double t_ancestral, double t_gsn_step, long steps_per_emitted_sample,
                             double ess_fraction) {
  if (!(t_ancestral > 0.0) || !(t_gsn_step > 0.0))
    raise(Errc::bad_input, "timings must be positive");
  if (steps_per_emitted_sample < 1) raise(Errc::bad_input, "steps per sample must be >= 1");
  if (!(ess_fraction > 0.0 && ess_fraction <= 1.0))
    raise(Errc::bad_input, "ess_fraction must lie in (0,1]");
  SpeedupReport r;
  r.t_ancestral_per_sample = t_ancestral;
  r.t_gsn_per_step = t_gsn_step;
  r.steps_per_emitted_sample = steps_per_emitted_sample;
  r.ess_fraction = ess_fraction;
  r.raw_factor = t_ancestral / t_gsn_step;
  r.effective_factor =
      r.raw_factor / static_cast<double>(steps_per_emitted_sample) * ess_fraction;
  return r;
}

ExactDistribution enumerate_fixed_order(const ModelParams& params, const Ordering& ordering) {
  if (params.D > 16) raise(Errc::too_large, "enumeration is guarded to D <= 16");
  const int D = params.D;
  const std::size_t n_states = std::size_t{1} << D;
  ExactDistribution dist;
  dist.D = D;
  dist.probabilities.resize(n_states);
  BinaryVector x(static_cast<std::size_t>(D));
  for (std::size_t s = 0; s < n_states; ++s) {
    for (int i = 0; i < D; ++i) x[static_cast<std::size_t>(i)] = (s >> i) & 1;
    dist.probabilities[s] = std::exp(log_likelihood_fixed_order(params, x, ordering));
  }
  return dist;
}

ExactDistribution enumerate_all_orders(const ModelParams& params) {
  if (params.D > 8) raise(Errc::too_large, "exhaustive ordering average is guarded to D <= 8");
  const int D = params.D;
  const std::size_t n_states = std::size_t{1} << D;
  ExactDistribution dist;
  dist.D = D;
  dist.probabilities.assign(n_states, 0.0);
  Ordering ord = Ordering::identity(D);
  long n_orders = 0;
  do {
    const ExactDistribution per = enumerate_fixed_order(params, ord);
    for (std::size_t s = 0; s < n_states; ++s) dist.probabilities[s] += per.probabilities[s];
    ++n_orders;
  } while (std::next_permutation(ord.perm.begin(), ord.perm.end()));
  for (auto& p : dist.probabilities) p /= static_cast<double>(n_orders);
  return dist;
}

TransitionMatrix exact_transition_matrix(const ModelParams& params, double p) {
  if (params.D > 12) raise(Errc::too_large, "transition matrix is guarded to D <= 12");
  if (!(p >= 0.0 && p <= 1.0)) raise(Errc::bad_noise, "p must lie in [0,1]");
  const int D = params.D;
  const int n = 1 << D;
  TransitionMatrix T;
  T.n_states = n;
  T.p.assign(static_cast<std::size_t>(n) * n, 0.0);

  BinaryVector x(static_cast<std::size_t>(D));
  Mask mask = Mask::zeros(D);
  ForwardTrace trace;
  std::vector<int> free_pos;
  std::vector<int> spread;      // free-assignment index -> packed state bits
  std::vector<double> outcome;  // probability of each free assignment under the conditionals

  // One forward pass per (keep-mask, kept-assignment); the conditionals only
  // see m and m*x, so every source state sharing those bits shares the pass.
  for (int m = 0; m < n; ++m) {
    const int kept = std::popcount(static_cast<unsigned>(m));
    const double pm = std::pow(p, D - kept) * std::pow(1.0 - p, kept);
    if (pm == 0.0) continue;

    free_pos.clear();
    for (int i = 0; i < D; ++i)
      if (!((m >> i) & 1)) free_pos.push_back(i);
    const int n_free = static_cast<int>(free_pos.size());
    const std::size_t n_assign = std::size_t{1} << n_free;

    spread.resize(n_assign);
    for (std::size_t f = 0; f < n_assign; ++f) {
      int bits = 0;
      for (int j = 0; j < n_free; ++j)
        if ((f >> j) & 1) bits |= 1 << free_pos[static_cast<std::size_t>(j)];
      spread[f] = bits;
    }

    for (int i = 0; i < D; ++i) mask.bits[static_cast<std::size_t>(i)] = (m >> i) & 1;

    // Iterate kept assignments as submasks of m.
    int a = m;
    while (true) {
      for (int i = 0; i < D; ++i) x[static_cast<std::size_t>(i)] = (a >> i) & 1;
      conditionals_into(params, x, mask, trace);

      outcome.assign(n_assign, 1.0);
      for (int j = 0; j < n_free; ++j) {
        const double r = trace.probabilities[static_cast<std::size_t>(free_pos[static_cast<std::size_t>(j)])];
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t f = 0; f < n_assign; ++f) outcome[f] *= (f & bit) ? r : (1.0 - r);
      }

      for (std::size_t fs = 0; fs < n_assign; ++fs) {
        double* row = T.p.data() + static_cast<std::size_t>(a | spread[fs]) * n;
        for (std::size_t ft = 0; ft < n_assign; ++ft) row[a | spread[ft]] += pm * outcome[ft];
      }

      if (a == 0) break;
      a = (a - 1) & m;
    }
  }
  return T;
}

StationaryResult stationary_distribution(const TransitionMatrix& matrix) {
  const int n = matrix.n_states;
  if (n < 1 || matrix.p.size() != static_cast<std::size_t>(n) * n)
    raise(Errc::shape_mismatch, "matrix is not square over 2^D states");
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += matrix.at(i, j);
    if (std::abs(row - 1.0) > 1e-9) raise(Errc::bad_input, "matrix is not row-stochastic");
  }

  StationaryResult result;
  result.dist.D = static_cast<int>(std::round(std::log2(static_cast<double>(n))));

  bool is_identity = true;
  for (int i = 0; i < n && is_identity; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(matrix.at(i, j) - (i == j ? 1.0 : 0.0)) > 1e-15) {
        is_identity = false;
        break;
      }

  std::vector<double> pi(static_cast<std::size_t>(n), 1.0 / n);
  if (is_identity) {
    // Every distribution is stationary; report the uniform start with a
    // degeneracy warning instead of iterating forever.
    result.degenerate_identity = true;
    result.dist.probabilities = pi;
    result.residual = 0.0;
    return result;
  }

  std::vector<double> next(static_cast<std::size_t>(n));
  constexpr long kMaxIters = 100000;
  for (long it = 1; it <= kMaxIters; ++it) {
    for (int j = 0; j < n; ++j) next[static_cast<std::size_t>(j)] = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = pi[static_cast<std::size_t>(i)];
      if (w == 0.0) continue;
      const double* row = matrix.p.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) next[static_cast<std::size_t>(j)] += w * row[j];
    }
    double tv = 0.0;
    for (int j = 0; j < n; ++j) tv += std::abs(next[static_cast<std::size_t>(j)] - pi[static_cast<std::size_t>(j)]);
    tv *= 0.5;
    pi.swap(next);
    if (tv < 1e-12) {
      result.iterations = it;
      result.dist.probabilities = pi;
      double res = 0.0;
      for (int j = 0; j < n; ++j) {
        double pj = 0.0;
        for (int i = 0; i < n; ++i) pj += pi[static_cast<std::size_t>(i)] * matrix.at(i, j);
        res += std::abs(pj - pi[static_cast<std::size_t>(j)]);
      }
      result.residual = res;
      return result;
    }
  }
  raise(Errc::no_convergence, "power iteration did not converge");
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) raise(Errc::shape_mismatch, "distributions differ in support size");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}

std::vector<double> state_histogram(const std::vector<BinaryVector>& samples, int D) {
  if (D < 1 || D > 20) raise(Errc::too_large, "histogram is guarded to D <= 20");
  std::vector<double> h(std::size_t{1} << D, 0.0);
  for (const auto& s : samples) {
    if (static_cast<int>(s.size()) != D) raise(Errc::shape_mismatch, "sample length differs from D");
    std::size_t idx = 0;
    for (int i = 0; i < D; ++i)
      if (s[static_cast<std::size_t>(i)]) idx |= std::size_t{1} << i;
    h[idx] += 1.0;
  }
  if (!samples.empty())
    for (auto& v : h) v /= static_cast<double>(samples.size());
  return h;
}

namespace {

double checked_duration(std::chrono::steady_clock::time_point t0,
                        std::chrono::steady_clock::time_point t1, int reps) {
  const double secs = std::chrono::duration<double>(t1 - t0).count();
  if (!(secs >= 0.0)) raise(Errc::bad_input, "negative duration measured");
  return secs / static_cast<double>(reps);
}

}  // namespace

double time_ancestral_per_sample(const ModelParams& params, int reps, std::uint64_t seed) {
  if (reps < 1) raise(Errc::bad_input, "reps must be >= 1");
  Rng rng(mix_seed(seed, stream_tag::sample, 0));
  ForwardTrace scratch;
  volatile std::uint8_t sink = 0;
  const int warmup = std::max(1, reps / 10);
  for (int i = 0; i < warmup; ++i) sink ^= ancestral_sample(params, rng, scratch)[0];
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) sink ^= ancestral_sample(params, rng, scratch)[0];
  const auto t1 = std::chrono::steady_clock::now();
  (void)sink;
  return checked_duration(t0, t1, reps);
}

double time_gsn_per_step(const ModelParams& params, int reps, double p, std::uint64_t seed) {
  if (reps < 1) raise(Errc::bad_input, "reps must be >= 1");
  ChainState state = make_chain(params, mix_seed(seed, stream_tag::chain, 0));
  for (auto& b : state.x) b = state.rng.bernoulli(0.5) ? 1 : 0;
  const int warmup = std::max(1, reps / 10);
  for (int i = 0; i < warmup; ++i) gsn_step(params, state, p);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) gsn_step(params, state, p);
  const auto t1 = std::chrono::steady_clock::now();
  return checked_duration(t0, t1, reps);
}

}  // namespace nadegsn
