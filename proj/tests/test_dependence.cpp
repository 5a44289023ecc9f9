#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mixlearn/dependence.hpp"
#include "mixlearn/process.hpp"

using namespace mixlearn;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Matrix flip_chain(double p) {
  Matrix t(2, 2);
  t << 1.0 - p, p, p, 1.0 - p;
  return t;
}

Matrix three_state() {
  Matrix t(3, 3);
  t << 0.6, 0.3, 0.1,
       0.2, 0.5, 0.3,
       0.1, 0.3, 0.6;
  return t;
}

MixtureLaw two_deltas() {
  return mixture_law({delta_law({2}, 0), delta_law({2}, 1)}, vec({0.5, 0.5}));
}

}  // namespace

TEST_CASE("symmetric-chain dependence matches the closed form |1-2p|^k / 2") {
  for (double p : {0.25, 0.1, 0.45}) {
    const ProcessLaw law = markov_law({2}, flip_chain(p));
    for (int k : {1, 2, 3, 5, 10}) {
      const double expected = std::pow(std::abs(1.0 - 2.0 * p), k) / 2.0;
      CHECK(std::abs(beta_exact_markov(law, k) - expected) < 1e-12);
    }
  }
}

TEST_CASE("dependence equals half the L1 gap of the lag-k joint table") {
  const ProcessLaw law = markov_law({3}, three_state());
  const Vector pi = stationary_distribution(law);
  for (int k : {1, 3}) {
    Matrix pk = law.transition;
    for (int step = 1; step < k; ++step) pk = pk * law.transition;
    double oracle = 0.0;
    for (Index s = 0; s < 3; ++s) {
      for (Index u = 0; u < 3; ++u) {
        oracle += std::abs(pi[s] * pk(s, u) - pi[s] * pi[u]);
      }
    }
    oracle /= 2.0;
    CHECK(std::abs(beta_exact_markov(law, k) - oracle) < 1e-14);
  }
}

TEST_CASE("exact curves are monotone non-increasing in the lag") {
  std::vector<int> lags;
  for (int k = 1; k <= 30; ++k) lags.push_back(k);
  for (const ProcessLaw& law :
       {markov_law({2}, flip_chain(0.25)), markov_law({2}, flip_chain(0.1)),
        markov_law({3}, three_state())}) {
    const BetaCurve curve = beta_exact_curve(law, lags);
    REQUIRE(curve.values.size() == 30);
    for (Index i = 0; i + 1 < curve.values.size(); ++i) {
      CHECK(curve.values[i + 1] <= curve.values[i]);
    }
  }
}

TEST_CASE("iid and delta laws have identically zero curves") {
  const BetaCurve iid = beta_exact_curve(iid_law({2}, vec({0.3, 0.7})), {1, 5});
  CHECK(iid.values[0] == 0.0);
  CHECK(iid.values[1] == 0.0);
  CHECK(iid.mode == BetaCurve::Mode::Exact);
  const BetaCurve point = beta_exact_curve(delta_law({3}, 1), {2, 4});
  CHECK(point.values.maxCoeff() == 0.0);
}

TEST_CASE("lag grids validate") {
  CHECK_THROWS_WITH_AS(beta_exact_markov(iid_law({2}, vec({0.5, 0.5})), 0),
                       "lag must be >= 1", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      beta_exact_curve(iid_law({2}, vec({0.5, 0.5})), {3, 2}),
      "lag grid must be strictly increasing", std::invalid_argument);
}

TEST_CASE("window enumeration agrees with one-step conditioning") {
  // The Markov property collapses the block computation, so every window
  // size reproduces the exact value, not only in the limit.
  const struct {
    int past, future;
  } windows[] = {{1, 1}, {2, 2}, {3, 2}, {3, 3}};
  for (const ProcessLaw& law :
       {markov_law({2}, flip_chain(0.25)), markov_law({2}, flip_chain(0.1)),
        markov_law({3}, three_state())}) {
    for (const auto& w : windows) {
      for (int k : {1, 2, 5}) {
        const double exact = beta_exact_markov(law, k);
        const double brute =
            beta_bruteforce_block(law, k, w.past, w.future);
        CHECK(std::abs(brute - exact) <= 1e-9);
      }
    }
  }
}

TEST_CASE("window enumeration is exactly zero for memoryless laws") {
  CHECK(beta_bruteforce_block(iid_law({2}, vec({0.5, 0.5})), 1, 2, 2) == 0.0);
  CHECK(beta_bruteforce_block(iid_law({2}, vec({0.25, 0.75})), 3, 2, 2) ==
        0.0);
  CHECK(beta_bruteforce_block(delta_law({3}, 2), 2, 2, 3) == 0.0);
}

TEST_CASE("window enumeration guards the state space") {
  const ProcessLaw law = iid_law({10}, Vector::Constant(10, 0.1));
  CHECK_THROWS_WITH_AS(beta_bruteforce_block(law, 1, 4, 4),
                       "state space too large", std::invalid_argument);
}

TEST_CASE("two-delta ensemble estimate sits at one half") {
  const MixtureLaw mix = two_deltas();
  for (int k : {1, 5}) {
    const BetaEstimate est = beta_empirical_ensemble(mix, k, 1, 1, 2000, 11);
    CHECK(std::abs(est.estimate - 0.5) <= 0.04);
    CHECK(est.se > 0.0);
    CHECK(est.occupied_cells == 2);
  }
}

TEST_CASE("three-delta ensemble estimate sits at the weight floor") {
  const MixtureLaw mix = mixture_law(
      {delta_law({3}, 0), delta_law({3}, 1), delta_law({3}, 2)},
      vec({0.5, 0.3, 0.2}));
  const BetaEstimate est = beta_empirical_ensemble(mix, 7, 1, 1, 2000, 13);
  CHECK(std::abs(est.estimate - 0.62) <= 0.05);
}

TEST_CASE("degenerate ensembles collapse to exact zero") {
  const MixtureLaw single =
      mixture_law({delta_law({2}, 1)}, Vector::Ones(1));
  const BetaEstimate est = beta_empirical_ensemble(single, 3, 2, 2, 200, 5);
  CHECK(est.estimate == 0.0);
  CHECK(est.se == 0.0);
  CHECK(est.occupied_cells == 1);
}

TEST_CASE("iid ensemble estimate is small") {
  const MixtureLaw coin =
      mixture_law({iid_law({2}, vec({0.5, 0.5}))}, Vector::Ones(1));
  const BetaEstimate est = beta_empirical_ensemble(coin, 2, 1, 1, 2000, 17);
  CHECK(est.estimate >= 0.0);
  CHECK(est.estimate < 0.05);
}

TEST_CASE("ensemble estimates are reproducible and worker-independent") {
  const MixtureLaw mix = two_deltas();
  const BetaEstimate a = beta_empirical_ensemble(mix, 2, 1, 1, 400, 21, 50, 1);
  const BetaEstimate b = beta_empirical_ensemble(mix, 2, 1, 1, 400, 21, 50, 1);
  const BetaEstimate c = beta_empirical_ensemble(mix, 2, 1, 1, 400, 21, 50, 3);
  CHECK(a.estimate == b.estimate);
  CHECK(a.se == b.se);
  CHECK(a.estimate == c.estimate);
  CHECK(a.se == c.se);
  // The two-delta estimate is a function of one binomial count, which two
  // seeds can tie on; the bootstrap se breaks the tie.
  const BetaEstimate d = beta_empirical_ensemble(mix, 2, 1, 1, 400, 22, 50, 1);
  CHECK((a.estimate != d.estimate || a.se != d.se));
}

TEST_CASE("ensemble validation") {
  const MixtureLaw mix = two_deltas();
  CHECK_THROWS_WITH_AS(beta_empirical_ensemble(mix, 1, 1, 1, 50, 1),
                       "ensemble estimate needs at least 100 paths",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(beta_empirical_ensemble(mix, 1, 1, 1, 200, 1, 1),
                       "bootstrap resample count must be >= 2",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(beta_empirical_ensemble(mix, 0, 1, 1, 200, 1),
                       "lag must be >= 1", std::invalid_argument);
  CHECK_THROWS_WITH_AS(beta_empirical_ensemble(mix, 1, 0, 1, 200, 1),
                       "window lengths must be >= 1", std::invalid_argument);
}

TEST_CASE("limiting mixture dependence is the weight floor") {
  CHECK(beta_mixture_infinity(vec({0.5, 0.5})) == 0.5);
  CHECK(std::abs(beta_mixture_infinity(vec({0.5, 0.3, 0.2})) - 0.62) < 1e-15);
  CHECK(std::abs(beta_mixture_infinity(Vector::Constant(10, 0.1)) - 0.9) <
        1e-15);
  // Uniform q-atom mixtures approach the atomless value 1 as q grows.
  CHECK(std::abs(beta_mixture_infinity(Vector::Constant(50, 0.02)) - 0.98) <
        1e-14);
  CHECK(beta_mixture_infinity(Vector::Ones(1)) == 0.0);
  CHECK_THROWS_WITH_AS(beta_mixture_infinity(vec({0.7, 0.7})),
                       "weights must be a probability vector",
                       std::invalid_argument);
}

TEST_CASE("block approximation bound clamps at one") {
  CHECK(blocking_bound(block_scheme(5, 2), 0.3) == 1.0);
  CHECK(std::abs(blocking_bound(block_scheme(3, 4), 0.1) - 0.2) < 1e-15);
  CHECK(blocking_bound(block_scheme(1, 8), 0.9) == 0.0);
  CHECK_THROWS_WITH_AS(blocking_bound(block_scheme(2, 2), 1.5),
                       "beta must lie in [0,1]", std::invalid_argument);
}

TEST_CASE("blocked resampling keeps the odd blocks in order") {
  SamplePath path;
  path.symbols.resize(8);
  path.symbols << 0, 0, 1, 1, 0, 1, 1, 0;
  const auto blocks = blocked_resample(path, block_scheme(2, 2), 0);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0][0] == 0);
  CHECK(blocks[0][1] == 0);
  CHECK(blocks[1][0] == 0);
  CHECK(blocks[1][1] == 1);

  SamplePath ramp;
  ramp.symbols.resize(18);
  for (Index i = 0; i < 18; ++i) ramp.symbols[i] = static_cast<int>(i);
  const auto kept = blocked_resample(ramp, block_scheme(3, 3), 99);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0][0] == 0);
  CHECK(kept[1][0] == 6);
  CHECK(kept[2][0] == 12);
  CHECK(kept[2][2] == 14);

  SamplePath wrong;
  wrong.symbols.resize(7);
  wrong.symbols.setZero();
  CHECK_THROWS_WITH_AS(blocked_resample(wrong, block_scheme(2, 2), 0),
                       "path length must equal 2*m*a", std::invalid_argument);
}

TEST_CASE("curve csv formats both modes") {
  BetaCurve exact;
  exact.lags = {1, 2};
  exact.values = vec({0.25, 0.125});
  exact.mode = BetaCurve::Mode::Exact;
  CHECK(exact.to_csv() ==
        "lag,beta,stderr,mode\n1,0.25,,exact\n2,0.125,,exact\n");

  BetaCurve est;
  est.lags = {3};
  est.values = vec({0.5});
  est.se = vec({0.0625});
  est.mode = BetaCurve::Mode::Estimated;
  CHECK(est.to_csv() == "lag,beta,stderr,mode\n3,0.5,0.0625,estimated\n");
}
