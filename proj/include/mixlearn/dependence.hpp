#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixlearn/process.hpp"
#include "mixlearn/types.hpp"

namespace mixlearn {

// Beta-dependence curve k -> beta(k), exact or estimated. In estimated mode
// `se` holds a bootstrap standard error per lag; in exact mode it is empty.
struct BetaCurve {
  enum class Mode { Exact, Estimated };
  std::vector<int> lags;
  Vector values;
  Mode mode = Mode::Exact;
  Vector se;

  // CSV columns: lag,beta,stderr,mode (stderr empty in exact mode).
  std::string to_csv() const;
};

// 2m contiguous blocks of length a covering a path of length n = 2ma.
struct BlockScheme {
  Index kept_blocks = 0;  // m
  Index block_len = 0;    // a
  Index total_len = 0;    // n == 2*m*a
};
BlockScheme block_scheme(Index kept_blocks, Index block_len);

struct BetaEstimate {
  double estimate = 0.0;
  double se = 0.0;
  Index occupied_cells = 0;  // distinct (past, future) pairs observed
};

// Exact beta(k) of a stationary irreducible aperiodic chain:
//   sum_i pi(i) * TV(P^k(i,.), pi).
// One-step conditioning suffices by the Markov property; the brute-force
// window estimate below converges to the same value and tests hold the two
// routes against each other. Computed by iterating the centered kernel
// P^k - 1 pi^T so the returned values are non-increasing in k all the way
// down, not just until P^k reaches the rounding floor near pi.
double beta_exact_markov(const ProcessLaw& law, int lag);

// Exact curve over a lag grid: Markov via beta_exact_markov, IID and Delta
// identically zero.
BetaCurve beta_exact_curve(const ProcessLaw& law, const std::vector<int>& lags);

// Exact TV between the joint law of (X_1..X_p, X_{p+k}..X_{p+k+f-1}) and the
// product of its marginals, by full enumeration of the window state space.
// Guard: alphabet^(p+f) <= 1e7.
double beta_bruteforce_block(const ProcessLaw& law, int lag, int past_len,
                             int future_len);

// Plug-in TV between the empirical joint histogram of (past window, future
// window) and the product of its empirical marginals over `trials`
// independent paths, one window pair per path. Dependence carried by the
// mixture is only visible across paths, which is why estimation uses an
// ensemble instead of one long realization. Standard error by bootstrap
// over paths.
BetaEstimate beta_empirical_ensemble(const MixtureLaw& mix, int lag,
                                     int past_len, int future_len,
                                     Index trials, std::uint64_t seed,
                                     int bootstrap = 200, int workers = 1);

// Limiting mixture dependence sum_i w_i (1 - w_i).
double beta_mixture_infinity(const Vector& weights);

// IID-block approximation error bound (m-1)*beta(a), clamped to [0,1].
double blocking_bound(const BlockScheme& scheme, double beta_a);

// Odd-indexed blocks 1,3,...,2m-1 (1-based) of a path of length 2ma, each of
// length a, within-block order preserved. Extraction is deterministic; the
// seed parameter is accepted for signature stability and unused.
std::vector<IntVector> blocked_resample(const SamplePath& path,
                                        const BlockScheme& scheme,
                                        std::uint64_t seed);

}  // namespace mixlearn
