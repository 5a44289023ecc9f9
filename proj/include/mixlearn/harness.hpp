#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "mixlearn/dependence.hpp"
#include "mixlearn/learning.hpp"
#include "mixlearn/process.hpp"
#include "mixlearn/types.hpp"

namespace mixlearn {

// Master seed used by every experiment unless overridden.
inline constexpr std::uint64_t kDefaultSeed = 1729;

// One quantitative verdict: `value relation bound` where relation is "<=" or
// ">=". Values are computed from the same data that lands in the tables, so
// a reader can recheck every verdict offline.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation = "<=";
  bool pass = false;
};

CheckResult check_le(std::string name, double value, double bound);
CheckResult check_ge(std::string name, double value, double bound);

struct ExperimentReport {
  std::string experiment;
  nlohmann::json config;
  std::vector<std::pair<std::string, std::string>> tables;  // name -> CSV text
  std::vector<CheckResult> checks;
  bool verdict = false;

  nlohmann::json to_json() const;
  // Writes report.json plus one <name>.csv per table into dir (created if
  // needed). File contents depend only on the config, never on wall-clock
  // time or worker count.
  void write(const std::string& dir) const;
};

// Law-of-total-probability identity at fixed n: the mixture failure rate
// equals the weight-average of component failure rates. Mixture and
// per-component trials share derived path seeds, so the identity is checked
// as a paired mean.
struct VerifyMixtureConfig {
  MixtureLaw mix;
  std::string class_kind = "thresholds";
  Index path_len = 500;
  std::vector<double> epsilons = {0.05, 0.1};
  Index trials = 10000;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;

  static VerifyMixtureConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};
ExperimentReport verify_mixture_theorem(const VerifyMixtureConfig& config);

// Sample-complexity parity for an all-IID mixture: the mixture learns on the
// shared grid no later than its slowest component. Optionally also runs the
// marginal-target contrast, which must fail everywhere on the grid.
struct VerifyExchangeableConfig {
  MixtureLaw mix;
  std::string class_kind = "thresholds";
  double epsilon = 0.1;
  double delta = 0.05;
  std::vector<Index> n_grid;  // empty means default_n_grid()
  Index trials = 2000;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  bool contrast_marginal = true;

  static VerifyExchangeableConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};
ExperimentReport verify_exchangeable_corollary(
    const VerifyExchangeableConfig& config);

// Component dependence dies out along the lag grid while the mixture's
// ensemble estimate stays pinned at the weight floor sum w_i (1 - w_i).
struct VerifyMarFloorConfig {
  MixtureLaw mix;
  std::vector<int> lags = {1, 2, 5, 10, 20, 30};
  int past_len = 1;
  int future_len = 1;
  Index trials = 10000;
  int bootstrap = 200;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  double component_decay_threshold = 0.01;  // exact component beta at max lag
  double floor_slack = 0.01;                // absolute slack on floor checks
  double mixture_min_at_max_lag = -1.0;     // extra lower verdict; < 0 skips

  static VerifyMarFloorConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};
ExperimentReport verify_mar_floor(const VerifyMarFloorConfig& config);

// Truncated mixture-identification statistic
//   E[ sup_l sup_B ( P(B | first l symbols, past) - P(B | past) ) ]
// where B ranges over events of a finite future window at lag k after the
// l block, the past is a length-n block, and the outer mean is over sampled
// pasts and l blocks. Checks that the statistic stays bounded away from zero
// at the smallest n and falls below twice the component dependence envelope
// at the largest n.
struct VerifyMarCriterionConfig {
  MixtureLaw mix;
  std::vector<Index> n_grid = {0, 4, 32};
  std::vector<int> k_grid = {5, 10, 20};
  std::vector<int> l_grid = {1, 2, 4, 8};
  int window = 8;  // future window length for the event supremum
  Index trials = 2000;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  double floor_fraction = 0.4;  // small-n lower bound, fraction of the floor

  static VerifyMarCriterionConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};
ExperimentReport verify_mar_criterion(const VerifyMarCriterionConfig& config);

}  // namespace mixlearn
