#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "mixlearn/harness.hpp"
#include "mixlearn/process.hpp"

using namespace mixlearn;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

MixtureLaw opposed_coins() {
  return mixture_law({iid_law({2}, vec({0.2, 0.8})),
                      iid_law({2}, vec({0.8, 0.2}))},
                     vec({0.5, 0.5}));
}

MixtureLaw two_deltas() {
  return mixture_law({delta_law({2}, 0), delta_law({2}, 1)}, vec({0.5, 0.5}));
}

MixtureLaw two_chains() {
  Matrix sticky(2, 2), flippy(2, 2);
  sticky << 0.9, 0.1, 0.1, 0.9;
  flippy << 0.1, 0.9, 0.9, 0.1;
  return mixture_law({markov_law({2}, sticky), markov_law({2}, flippy)},
                     vec({0.5, 0.5}));
}

// Parsed CSV: rows of string cells, header dropped.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  bool header = true;
  while (std::getline(lines, line)) {
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

const std::string& table(const ExperimentReport& report,
                         const std::string& name) {
  for (const auto& [n, csv] : report.tables) {
    if (n == name) return csv;
  }
  throw std::runtime_error("missing table " + name);
}

// Every verdict must be recomputable from its own value/bound row.
void check_report_consistency(const ExperimentReport& report) {
  bool all = true;
  for (const CheckResult& c : report.checks) {
    REQUIRE((c.relation == "<=" || c.relation == ">="));
    const bool expected =
        c.relation == "<=" ? c.value <= c.bound : c.value >= c.bound;
    CHECK(c.pass == expected);
    all = all && c.pass;
  }
  CHECK(report.verdict == all);
}

const CheckResult& find_check(const ExperimentReport& report,
                              const std::string& name) {
  for (const CheckResult& c : report.checks) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("missing check " + name);
}

}  // namespace

TEST_CASE("check helpers evaluate their relation") {
  CHECK(check_le("a", 1.0, 1.0).pass);
  CHECK_FALSE(check_le("a", 1.1, 1.0).pass);
  CHECK(check_ge("b", 0.5, 0.5).pass);
  CHECK_FALSE(check_ge("b", 0.4, 0.5).pass);
  CHECK(check_le("a", 1.0, 2.0).relation == "<=");
  CHECK(check_ge("a", 1.0, 0.0).relation == ">=");
}

TEST_CASE("mixture identity holds for opposed coins") {
  VerifyMixtureConfig config;
  config.mix = opposed_coins();
  config.path_len = 400;
  config.trials = 1500;
  const ExperimentReport report = verify_mixture_theorem(config);
  CHECK(report.experiment == "verify-mixture");
  CHECK(report.verdict);
  check_report_consistency(report);

  // The paired identity re-derives from the emitted table.
  for (const auto& row : parse_csv(table(report, "identity"))) {
    REQUIRE(row.size() == 3);
    const double diff = std::stod(row[1]);
    const double se = std::stod(row[2]);
    CHECK(std::abs(diff) <= 3.0 * se);
  }
  const auto rates = parse_csv(table(report, "rates"));
  CHECK(rates.size() == 2 * 3);  // two epsilons, mixture + two components
  CHECK(find_check(report, "identity(eps=0.1)").relation == "<=");
}

TEST_CASE("single-component mixtures satisfy the identity exactly") {
  VerifyMixtureConfig config;
  config.mix = mixture_law({iid_law({2}, vec({0.3, 0.7}))}, Vector::Ones(1));
  config.path_len = 60;
  config.trials = 200;
  config.epsilons = {0.1};
  const ExperimentReport report = verify_mixture_theorem(config);
  CHECK(report.verdict);
  const auto rows = parse_csv(table(report, "identity"));
  REQUIRE(rows.size() == 1);
  CHECK(std::stod(rows[0][1]) == 0.0);
  CHECK(std::stod(rows[0][2]) == 0.0);
}

TEST_CASE("delta mixtures never fail against their own component") {
  VerifyMixtureConfig config;
  config.mix = two_deltas();
  config.path_len = 40;
  config.trials = 200;
  config.epsilons = {0.05, 0.5};
  const ExperimentReport report = verify_mixture_theorem(config);
  CHECK(report.verdict);
  for (const auto& row : parse_csv(table(report, "rates"))) {
    CHECK(std::stod(row[2]) == 0.0);
  }
}

TEST_CASE("exchangeable parity on opposed unfair coins") {
  VerifyExchangeableConfig config;
  config.mix = mixture_law({iid_law({2}, vec({0.1, 0.9})),
                            iid_law({2}, vec({0.9, 0.1}))},
                           vec({0.5, 0.5}));
  config.n_grid = {32, 64, 128, 256, 512};
  config.trials = 400;
  const ExperimentReport report = verify_exchangeable_corollary(config);
  CHECK(report.experiment == "verify-exchangeable");
  CHECK(report.verdict);
  check_report_consistency(report);
  CHECK(find_check(report, "mixture_n_star_le_max_component").pass);
  CHECK(find_check(report, "contrast_n_star_absent").pass);

  const auto stars = parse_csv(table(report, "n_star"));
  REQUIRE(stars.size() == 4);  // mixture, two components, contrast
  CHECK(stars[0][0] == "mixture");
  CHECK(stars[0][2] == "1");
  CHECK(stars[3][0] == "contrast");
  CHECK(stars[3][1] == "");
  CHECK(stars[3][2] == "0");

  // The contrast target pins every failure rate at one for this mixture.
  for (const auto& row : parse_csv(table(report, "contrast_curve"))) {
    CHECK(std::stod(row[1]) == 1.0);
  }
}

TEST_CASE("near-identical components learn at the mixture's pace") {
  VerifyExchangeableConfig config;
  config.mix = mixture_law(
      {iid_law({2}, vec({0.5, 0.5})),
       iid_law({2}, vec({0.5 + 1e-9, 0.5 - 1e-9}))},
      vec({0.5, 0.5}));
  config.epsilon = 0.2;
  config.n_grid = {32, 64};
  config.trials = 400;
  config.contrast_marginal = false;
  const ExperimentReport report = verify_exchangeable_corollary(config);
  CHECK(report.verdict);
  const auto stars = parse_csv(table(report, "n_star"));
  REQUIRE(stars.size() == 3);
  CHECK(stars[0][1] == stars[1][1]);
  CHECK(stars[1][1] == stars[2][1]);
}

TEST_CASE("exchangeable harness rejects dependent components") {
  VerifyExchangeableConfig config;
  config.mix = two_chains();
  CHECK_THROWS_WITH_AS(verify_exchangeable_corollary(config),
                       "verify-exchangeable requires iid mixture components",
                       std::invalid_argument);
}

TEST_CASE("floor harness on the two-delta mixture") {
  VerifyMarFloorConfig config;
  config.mix = two_deltas();
  config.lags = {1, 3, 5};
  config.trials = 1500;
  config.bootstrap = 100;
  config.floor_slack = 0.02;
  config.mixture_min_at_max_lag = 0.4;
  const ExperimentReport report = verify_mar_floor(config);
  CHECK(report.experiment == "verify-mar-floor");
  CHECK(report.verdict);
  check_report_consistency(report);
  CHECK(table(report, "floor") == "floor\n0.5\n");
  for (const auto& row : parse_csv(table(report, "component_beta"))) {
    CHECK(std::stod(row[2]) == 0.0);
  }
  // floor_lower re-derives from the ensemble table and the declared slack.
  const auto ens = parse_csv(table(report, "ensemble"));
  REQUIRE(ens.size() == 3);
  for (const auto& row : ens) {
    const double est = std::stod(row[1]);
    const double se = std::stod(row[2]);
    CHECK(est >= 0.5 - 2.0 * se - config.floor_slack);
    CHECK(est <= 0.5);  // the two-cell plug-in value never exceeds 1/2
  }
}

TEST_CASE("floor harness separates chain decay from the mixture floor") {
  VerifyMarFloorConfig config;
  config.mix = two_chains();
  config.lags = {1, 10, 30};
  config.past_len = 8;
  config.future_len = 8;
  config.trials = 3000;
  config.bootstrap = 100;
  config.component_decay_threshold = 1e-3;
  config.floor_slack = 0.02;
  config.mixture_min_at_max_lag = 0.4;
  const ExperimentReport report = verify_mar_floor(config);
  CHECK(report.verdict);
  check_report_consistency(report);
  CHECK(find_check(report, "component_0_decay").value ==
        doctest::Approx(std::pow(0.8, 30) / 2.0).epsilon(1e-9));
  CHECK(find_check(report, "mixture_min(k=30)").pass);
}

TEST_CASE("criterion harness is exact on the two-delta mixture") {
  VerifyMarCriterionConfig config;
  config.mix = two_deltas();
  config.n_grid = {0, 1};
  config.k_grid = {1, 2};
  config.l_grid = {1, 2};
  config.window = 3;
  config.trials = 150;
  const ExperimentReport report = verify_mar_criterion(config);
  CHECK(report.experiment == "verify-mar-criterion");
  CHECK(report.verdict);
  check_report_consistency(report);
  CHECK(report.config.at("events_mode") == "full_window");

  // One observed symbol identifies the delta component: the statistic is
  // exactly 1/2 with no conditioning and exactly 0 with any.
  for (const auto& row : parse_csv(table(report, "statistic"))) {
    REQUIRE(row.size() == 4);
    if (row[0] == "0") {
      CHECK(std::stod(row[2]) == 0.5);
    } else {
      CHECK(std::stod(row[2]) == 0.0);
    }
    CHECK(std::stod(row[3]) == 0.0);
  }
  for (const auto& row : parse_csv(table(report, "envelope"))) {
    CHECK(std::stod(row[1]) == 0.0);
  }
}

TEST_CASE("criterion harness bounds a single chain by its own envelope") {
  VerifyMarCriterionConfig config;
  config.mix = mixture_law({markov_law({2}, [] {
                             Matrix t(2, 2);
                             t << 0.75, 0.25, 0.25, 0.75;
                             return t;
                           }())},
                           Vector::Ones(1));
  config.n_grid = {0, 8};
  config.k_grid = {1, 3};
  config.l_grid = {1, 2};
  config.window = 4;
  config.trials = 200;
  const ExperimentReport report = verify_mar_criterion(config);
  CHECK(report.verdict);
  check_report_consistency(report);

  const auto env = parse_csv(table(report, "envelope"));
  REQUIRE(env.size() == 2);
  CHECK(std::stod(env[0][1]) == doctest::Approx(0.25).epsilon(1e-12));
  std::vector<double> envelope = {std::stod(env[0][1]), std::stod(env[1][1])};
  // Within one component the conditional laws differ by at most the
  // dependence at the gap, so the bound holds at every grid point.
  const auto stats = parse_csv(table(report, "statistic"));
  REQUIRE(stats.size() == 4);
  for (const auto& row : stats) {
    const std::size_t ki = row[1] == "1" ? 0 : 1;
    CHECK(std::stod(row[2]) <=
          2.0 * envelope[ki] + 3.0 * std::stod(row[3]) + 1e-12);
  }
}

TEST_CASE("criterion config validates its grids") {
  VerifyMarCriterionConfig config;
  config.mix = two_deltas();
  config.trials = 50;
  CHECK_THROWS_WITH_AS(verify_mar_criterion(config),
                       "criterion estimate needs at least 100 trials",
                       std::invalid_argument);
  config.trials = 200;
  config.window = 0;
  CHECK_THROWS_WITH_AS(verify_mar_criterion(config), "window must be >= 1",
                       std::invalid_argument);
  config.window = 2;
  config.floor_fraction = 1.5;
  CHECK_THROWS_WITH_AS(verify_mar_criterion(config),
                       "floor fraction must lie in [0,1]",
                       std::invalid_argument);
}

TEST_CASE("configs round trip through json") {
  {
    VerifyMixtureConfig c;
    c.mix = opposed_coins();
    c.trials = 123;
    c.epsilons = {0.07};
    const nlohmann::json j = c.to_json();
    CHECK(VerifyMixtureConfig::from_json(j).to_json().dump() == j.dump());
  }
  {
    VerifyExchangeableConfig c;
    c.mix = opposed_coins();
    c.n_grid = {16, 32};
    c.contrast_marginal = false;
    const nlohmann::json j = c.to_json();
    CHECK(VerifyExchangeableConfig::from_json(j).to_json().dump() == j.dump());
  }
  {
    VerifyMarFloorConfig c;
    c.mix = two_deltas();
    c.mixture_min_at_max_lag = 0.4;
    const nlohmann::json j = c.to_json();
    CHECK(VerifyMarFloorConfig::from_json(j).to_json().dump() == j.dump());
  }
  {
    VerifyMarCriterionConfig c;
    c.mix = two_chains();
    c.window = 5;
    const nlohmann::json j = c.to_json();
    CHECK(VerifyMarCriterionConfig::from_json(j).to_json().dump() == j.dump());
  }
}

TEST_CASE("configs reject unknown keys") {
  VerifyMixtureConfig c;
  c.mix = two_deltas();
  nlohmann::json j = c.to_json();
  j["typo_field"] = 1;
  CHECK_THROWS_AS(VerifyMixtureConfig::from_json(j), std::invalid_argument);
}

TEST_CASE("reports write deterministic files") {
  VerifyMixtureConfig config;
  config.mix = two_deltas();
  config.path_len = 20;
  config.trials = 150;
  config.epsilons = {0.1};
  const ExperimentReport report = verify_mixture_theorem(config);

  namespace fs = std::filesystem;
  const fs::path base =
      fs::temp_directory_path() / "mixlearn_harness_test";
  fs::remove_all(base);
  report.write((base / "a").string());
  report.write((base / "b").string());

  for (const char* name : {"report.json", "rates.csv", "identity.csv"}) {
    const fs::path pa = base / "a" / name;
    REQUIRE(fs::exists(pa));
    std::ifstream fa(pa), fb(base / "b" / name);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
  }

  std::ifstream f(base / "a" / "report.json");
  nlohmann::json j;
  f >> j;
  CHECK(j.at("experiment") == "verify-mixture");
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("config").at("trials") == 150);
  CHECK(j.at("checks").size() == report.checks.size());
  fs::remove_all(base);
}
