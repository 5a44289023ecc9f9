#include "mixlearn/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "format_util.hpp"
#include "mixlearn/parallel.hpp"
#include "mixlearn/rng.hpp"
#include "mixlearn/windows.hpp"

namespace mixlearn {

namespace {

void check_lag(int k) {
  if (k < 1) throw std::invalid_argument("lag must be >= 1");
}

void check_lag_grid(const std::vector<int>& lags) {
  if (lags.empty()) throw std::invalid_argument("lag grid must be nonempty");
  int prev = 0;
  for (int k : lags) {
    if (k <= prev) {
      throw std::invalid_argument("lag grid must be strictly increasing");
    }
    prev = k;
  }
}

// Plug-in TV from integer count tables, kept in exact int64 arithmetic:
//   TV = [ sum_J |N c_vu - c_v c_u| + N^2 - sum_J c_v c_u ] / (2 N^2)
// where J is the support of the joint table. The value is independent of
// map iteration order.
double counts_tv(const std::unordered_map<std::int64_t, std::int64_t>& joint,
                 const std::unordered_map<std::int64_t, std::int64_t>& past,
                 const std::unordered_map<std::int64_t, std::int64_t>& future,
                 std::int64_t n, std::int64_t fut_count) {
  std::int64_t on_support = 0;
  std::int64_t product_on_support = 0;
  for (const auto& [key, c] : joint) {
    const std::int64_t cv = past.at(key / fut_count);
    const std::int64_t cu = future.at(key % fut_count);
    on_support += std::abs(n * c - cv * cu);
    product_on_support += cv * cu;
  }
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  return (static_cast<double>(on_support) +
          (n2 - static_cast<double>(product_on_support))) /
         (2.0 * n2);
}

}  // namespace

std::string BetaCurve::to_csv() const {
  std::string out = "lag,beta,stderr,mode\n";
  const bool estimated = mode == Mode::Estimated;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    out += std::to_string(lags[i]);
    out += ',';
    out += detail::fmt_double(values[static_cast<Index>(i)]);
    out += ',';
    if (estimated) out += detail::fmt_double(se[static_cast<Index>(i)]);
    out += ',';
    out += estimated ? "estimated" : "exact";
    out += '\n';
  }
  return out;
}

BlockScheme block_scheme(Index kept_blocks, Index block_len) {
  if (kept_blocks < 1 || block_len < 1) {
    throw std::invalid_argument("block scheme requires m >= 1 and a >= 1");
  }
  BlockScheme s;
  s.kept_blocks = kept_blocks;
  s.block_len = block_len;
  s.total_len = 2 * kept_blocks * block_len;
  return s;
}

double beta_exact_markov(const ProcessLaw& law, int lag) {
  check_lag(lag);
  const MarkovKernel kernel = as_kernel(law);
  const Vector& pi = kernel.initial;
  // Iterates D_k = P^k - 1 pi^T via D_{k+1} = D_k P, exact because
  // pi P = pi. Row L1 norms contract under a stochastic kernel and the
  // entries stay on the scale of the current beta, so the computed values
  // keep shrinking with k instead of bottoming out in the rounding noise
  // of a full power P^k near its stationary limit. Rows of the true D_k
  // sum to zero and the row-sum direction is invariant under the
  // multiplication, so rounding drift along it would persist forever;
  // projecting it out each step keeps the iteration inside the contracting
  // subspace.
  Matrix diff = kernel.transition - Vector::Ones(pi.size()) * pi.transpose();
  diff.colwise() -= diff.rowwise().mean().eval();
  for (int step = 1; step < lag; ++step) {
    diff = diff * kernel.transition;
    diff.colwise() -= diff.rowwise().mean().eval();
  }
  double beta = 0.0;
  for (Index i = 0; i < pi.size(); ++i) {
    beta += pi[i] * 0.5 * diff.row(i).lpNorm<1>();
  }
  return beta;
}

BetaCurve beta_exact_curve(const ProcessLaw& law, const std::vector<int>& lags) {
  check_lag_grid(lags);
  BetaCurve curve;
  curve.lags = lags;
  curve.mode = BetaCurve::Mode::Exact;
  curve.values.resize(static_cast<Index>(lags.size()));
  for (std::size_t i = 0; i < lags.size(); ++i) {
    curve.values[static_cast<Index>(i)] = beta_exact_markov(law, lags[i]);
  }
  return curve;
}

double beta_bruteforce_block(const ProcessLaw& law, int lag, int past_len,
                             int future_len) {
  check_lag(lag);
  if (past_len < 1 || future_len < 1) {
    throw std::invalid_argument("window lengths must be >= 1");
  }
  window_count(law.alphabet.size, past_len + future_len);
  const int a = law.alphabet.size;
  const MarkovKernel kernel = as_kernel(law);
  const Index past_count = window_count(a, past_len);
  const Index fut_count = window_count(a, future_len);

  const Vector past_law = window_law(kernel.initial, kernel.transition,
                                     past_len, a);
  const Matrix gap = kernel_power(law, lag);
  // Future-window law conditional on the last past symbol s: the window
  // starts lag steps after s.
  std::vector<Vector> fut_given(a);
  for (int s = 0; s < a; ++s) {
    fut_given[s] = window_law(gap.row(s).transpose(), kernel.transition,
                              future_len, a);
  }

  Vector mass_by_last = Vector::Zero(a);
  for (Index v = 0; v < past_count; ++v) mass_by_last[v % a] += past_law[v];
  Vector fut_marginal = Vector::Zero(fut_count);
  Vector fut_sum(a);
  for (int s = 0; s < a; ++s) {
    fut_marginal += mass_by_last[s] * fut_given[s];
    fut_sum[s] = fut_given[s].sum();
  }

  double acc = 0.0;
  for (Index v = 0; v < past_count; ++v) {
    const int s = static_cast<int>(v % a);
    const double pv = past_law[v];
    const double past_marginal = pv * fut_sum[s];
    const Vector& fg = fut_given[s];
    for (Index u = 0; u < fut_count; ++u) {
      acc += std::abs(pv * fg[u] - past_marginal * fut_marginal[u]);
    }
  }
  return 0.5 * acc;
}

BetaEstimate beta_empirical_ensemble(const MixtureLaw& mix, int lag,
                                     int past_len, int future_len,
                                     Index trials, std::uint64_t seed,
                                     int bootstrap, int workers) {
  check_lag(lag);
  if (past_len < 1 || future_len < 1) {
    throw std::invalid_argument("window lengths must be >= 1");
  }
  if (trials < 100) {
    throw std::invalid_argument("ensemble estimate needs at least 100 paths");
  }
  if (bootstrap < 2) {
    throw std::invalid_argument("bootstrap resample count must be >= 2");
  }
  const int a = mix.alphabet.size;
  window_count(a, past_len + future_len);
  const Index fut_count = window_count(a, future_len);
  const Index path_len = past_len + lag + future_len - 1;

  // One (past window, future window) pair per independent path. The mixture
  // dependence lives across paths, not along any single one.
  std::vector<std::int64_t> pair_codes(static_cast<std::size_t>(trials));
  parallel_for(trials, workers, [&](Index t) {
    const SamplePath path =
        sample_mixture(mix, path_len, derive_seed(seed, streams::kTrial,
                                                  static_cast<std::uint64_t>(t)));
    const Index v = encode_window(path.symbols, 0, past_len, a);
    const Index u = encode_window(path.symbols, past_len + lag - 1, future_len,
                                  a);
    pair_codes[static_cast<std::size_t>(t)] =
        static_cast<std::int64_t>(v) * fut_count + u;
  });

  const auto estimate_from =
      [&](const std::vector<std::int64_t>& codes) {
        std::unordered_map<std::int64_t, std::int64_t> joint, past, future;
        for (const std::int64_t code : codes) {
          ++joint[code];
          ++past[code / fut_count];
          ++future[code % fut_count];
        }
        return std::pair<double, Index>(
            counts_tv(joint, past, future, trials, fut_count),
            static_cast<Index>(joint.size()));
      };

  BetaEstimate result;
  const auto [est, occupied] = estimate_from(pair_codes);
  result.estimate = est;
  result.occupied_cells = occupied;

  Vector boots(bootstrap);
  parallel_for(bootstrap, workers, [&](Index b) {
    Rng rng(derive_seed(seed, streams::kBootstrap,
                        static_cast<std::uint64_t>(b)));
    std::vector<std::int64_t> resampled(static_cast<std::size_t>(trials));
    for (Index t = 0; t < trials; ++t) {
      resampled[static_cast<std::size_t>(t)] =
          pair_codes[static_cast<std::size_t>(rng.uniform_index(trials))];
    }
    boots[b] = estimate_from(resampled).first;
  });
  const double mean = boots.mean();
  result.se = std::sqrt((boots.array() - mean).square().sum() /
                        static_cast<double>(bootstrap - 1));
  return result;
}

double beta_mixture_infinity(const Vector& weights) {
  if (!is_probability_vector(weights)) {
    throw std::invalid_argument("weights must be a probability vector");
  }
  double acc = 0.0;
  for (Index i = 0; i < weights.size(); ++i) {
    acc += weights[i] * (1.0 - weights[i]);
  }
  return acc;
}

double blocking_bound(const BlockScheme& scheme, double beta_a) {
  if (!(beta_a >= 0.0 && beta_a <= 1.0)) {
    throw std::invalid_argument("beta must lie in [0,1]");
  }
  const double bound = static_cast<double>(scheme.kept_blocks - 1) * beta_a;
  return std::clamp(bound, 0.0, 1.0);
}

std::vector<IntVector> blocked_resample(const SamplePath& path,
                                        const BlockScheme& scheme,
                                        std::uint64_t seed) {
  (void)seed;
  if (path.symbols.size() != scheme.total_len) {
    throw std::invalid_argument("path length must equal 2*m*a");
  }
  std::vector<IntVector> blocks;
  blocks.reserve(static_cast<std::size_t>(scheme.kept_blocks));
  for (Index i = 0; i < scheme.kept_blocks; ++i) {
    blocks.push_back(
        path.symbols.segment(2 * i * scheme.block_len, scheme.block_len));
  }
  return blocks;
}

}  // namespace mixlearn
