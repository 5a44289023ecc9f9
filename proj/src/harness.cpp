#include "mixlearn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "format_util.hpp"
#include "json_util.hpp"
#include "mixlearn/parallel.hpp"
#include "mixlearn/rng.hpp"
#include "mixlearn/windows.hpp"

namespace mixlearn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FunctionClass class_from_kind(const std::string& kind, Alphabet alphabet) {
  if (kind == "thresholds") return thresholds_class(alphabet);
  if (kind == "intervals") return intervals_class(alphabet);
  throw std::invalid_argument("unknown class kind \"" + kind + "\"");
}

double sample_sd(const Vector& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = xs.mean();
  return std::sqrt((xs.array() - mean).square().sum() /
                   static_cast<double>(xs.size() - 1));
}

double binomial_se(double rate, Index trials) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

void check_strictly_increasing(const std::vector<int>& xs, int min_value,
                               const char* what) {
  if (xs.empty()) {
    throw std::invalid_argument(std::string(what) + " must be nonempty");
  }
  int prev = min_value - 1;
  for (int x : xs) {
    if (x < min_value || x <= prev) {
      throw std::invalid_argument(std::string(what) +
                                  " must be strictly increasing");
    }
    prev = x;
  }
}

std::uint64_t seed_from_json(const nlohmann::json& j) {
  return j.get<std::uint64_t>();
}

int workers_from_json(const nlohmann::json& j, int fallback) {
  return j.is_null() ? fallback : j.get<int>();
}

// Workers and any output location are execution parameters, not experiment
// parameters: results must not depend on them, so the echoed config omits
// them by construction.
template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Vector softmax_from_log(const Vector& ll) {
  double mx = -kInf;
  for (Index i = 0; i < ll.size(); ++i) mx = std::max(mx, ll[i]);
  Vector p(ll.size());
  for (Index i = 0; i < ll.size(); ++i) {
    p[i] = ll[i] == -kInf ? 0.0 : std::exp(ll[i] - mx);
  }
  return p / p.sum();
}

// sup over events B of P(B) - Q(B) for laws on the same finite space.
double one_sided_sup(const Vector& p, const Vector& q) {
  return (p - q).cwiseMax(0.0).sum();
}

}  // namespace

CheckResult check_le(std::string name, double value, double bound) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.bound = bound;
  c.relation = "<=";
  c.pass = value <= bound;
  return c;
}

CheckResult check_ge(std::string name, double value, double bound) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.bound = bound;
  c.relation = ">=";
  c.pass = value >= bound;
  return c;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["config"] = config;
  nlohmann::json checks_json = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["value"] = c.value;
    cj["bound"] = c.bound;
    cj["relation"] = c.relation;
    cj["pass"] = c.pass;
    checks_json.push_back(cj);
  }
  j["checks"] = checks_json;
  nlohmann::json tables_json = nlohmann::json::array();
  for (const auto& [name, csv] : tables) tables_json.push_back(name + ".csv");
  j["verdict"] = verdict ? "pass" : "fail";
  j["tables"] = tables_json;
  return j;
}

void ExperimentReport::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const auto write_file = [&](const std::string& name,
                              const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + path);
  };
  write_file("report.json", to_json().dump(2) + "\n");
  for (const auto& [name, csv] : tables) write_file(name + ".csv", csv);
}

VerifyMixtureConfig VerifyMixtureConfig::from_json(const nlohmann::json& j) {
  detail::require_keys(j,
                       {"mixture", "class", "path_len", "epsilons", "trials",
                        "seed", "workers"},
                       "verify-mixture config");
  VerifyMixtureConfig c;
  c.mix = mixture_from_json(j.at("mixture"));
  read_if(j, "class", c.class_kind);
  read_if(j, "path_len", c.path_len);
  read_if(j, "epsilons", c.epsilons);
  read_if(j, "trials", c.trials);
  if (j.contains("seed")) c.seed = seed_from_json(j.at("seed"));
  if (j.contains("workers")) c.workers = workers_from_json(j.at("workers"), 1);
  return c;
}

nlohmann::json VerifyMixtureConfig::to_json() const {
  nlohmann::json j;
  j["mixture"] = mixture_to_json(mix);
  j["class"] = class_kind;
  j["path_len"] = path_len;
  j["epsilons"] = epsilons;
  j["trials"] = trials;
  j["seed"] = seed;
  return j;
}

ExperimentReport verify_mixture_theorem(const VerifyMixtureConfig& config) {
  if (config.path_len < 1) {
    throw std::invalid_argument("path length must be positive");
  }
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.epsilons.empty()) {
    throw std::invalid_argument("epsilon list must be nonempty");
  }
  for (double eps : config.epsilons) {
    if (!(eps > 0.0 && eps < 1.0)) {
      throw std::invalid_argument("epsilon must lie in (0,1)");
    }
  }
  const MixtureLaw& mix = config.mix;
  const FunctionClass cls = class_from_kind(config.class_kind, mix.alphabet);
  const Index comp_count = static_cast<Index>(mix.components.size());
  const Index trials = config.trials;

  std::vector<Vector> comp_dist(static_cast<std::size_t>(comp_count));
  for (Index i = 0; i < comp_count; ++i) {
    comp_dist[static_cast<std::size_t>(i)] =
        marginal_distribution(mix.components[static_cast<std::size_t>(i)]);
  }

  // Trial t evaluates every component on a path drawn with the shared
  // derived path seed; the mixture outcome is the picked component's row.
  // The total-probability identity then holds conditionally on each trial's
  // paths, which the paired check below exploits.
  Matrix gaps(trials, comp_count);
  std::vector<int> picked(static_cast<std::size_t>(trials));
  const Vector weight_cum = cumulative(mix.weights);
  parallel_for(trials, config.workers, [&](Index t) {
    const std::uint64_t trial_seed =
        derive_seed(config.seed, streams::kTrial, static_cast<std::uint64_t>(t));
    Rng pick(derive_seed(trial_seed, streams::kComponent, 0));
    picked[static_cast<std::size_t>(t)] = pick.categorical(weight_cum);
    const std::uint64_t path_seed = derive_seed(trial_seed, streams::kPath, 0);
    for (Index i = 0; i < comp_count; ++i) {
      const SamplePath path = sample_component(
          mix.components[static_cast<std::size_t>(i)], config.path_len,
          path_seed);
      gaps(t, i) =
          gap_report(path, cls, comp_dist[static_cast<std::size_t>(i)]).sup_gap;
    }
  });

  ExperimentReport report;
  report.experiment = "verify-mixture";
  report.config = config.to_json();
  std::string rates_csv = "epsilon,group,rate,stderr\n";
  std::string identity_csv = "epsilon,mean_diff,stderr_diff\n";
  for (const double eps : config.epsilons) {
    Vector comp_rate(comp_count);
    for (Index i = 0; i < comp_count; ++i) {
      Index fails = 0;
      for (Index t = 0; t < trials; ++t) fails += gaps(t, i) >= eps ? 1 : 0;
      comp_rate[i] = static_cast<double>(fails) / static_cast<double>(trials);
    }
    Index mix_fails = 0;
    Vector paired(trials);
    for (Index t = 0; t < trials; ++t) {
      const int j = picked[static_cast<std::size_t>(t)];
      const double mix_fail = gaps(t, j) >= eps ? 1.0 : 0.0;
      mix_fails += mix_fail > 0.0 ? 1 : 0;
      double expected = 0.0;
      for (Index i = 0; i < comp_count; ++i) {
        expected += mix.weights[i] * (gaps(t, i) >= eps ? 1.0 : 0.0);
      }
      paired[t] = mix_fail - expected;
    }
    const double mix_rate =
        static_cast<double>(mix_fails) / static_cast<double>(trials);
    const double mix_se = binomial_se(mix_rate, trials);
    const double diff = paired.mean();
    const double diff_se = sample_sd(paired) /
                           std::sqrt(static_cast<double>(trials));

    rates_csv += detail::fmt_double(eps) + ",mixture," +
                 detail::fmt_double(mix_rate) + "," +
                 detail::fmt_double(mix_se) + "\n";
    for (Index i = 0; i < comp_count; ++i) {
      rates_csv += detail::fmt_double(eps) + ",component_" +
                   std::to_string(i) + "," + detail::fmt_double(comp_rate[i]) +
                   "," + detail::fmt_double(binomial_se(comp_rate[i], trials)) +
                   "\n";
    }
    identity_csv += detail::fmt_double(eps) + "," + detail::fmt_double(diff) +
                    "," + detail::fmt_double(diff_se) + "\n";

    Index arg = 0;
    for (Index i = 1; i < comp_count; ++i) {
      if (comp_rate[i] > comp_rate[arg]) arg = i;
    }
    const double max_se = binomial_se(comp_rate[arg], trials);
    report.checks.push_back(check_le(
        "identity(eps=" + detail::fmt_short(eps) + ")", std::abs(diff),
        3.0 * diff_se));
    report.checks.push_back(check_le(
        "mixture_below_max(eps=" + detail::fmt_short(eps) + ")", mix_rate,
        comp_rate[arg] +
            3.0 * std::sqrt(mix_se * mix_se + max_se * max_se)));
  }
  report.tables.emplace_back("rates", rates_csv);
  report.tables.emplace_back("identity", identity_csv);
  report.verdict = std::all_of(report.checks.begin(), report.checks.end(),
                               [](const CheckResult& c) { return c.pass; });
  return report;
}

VerifyExchangeableConfig VerifyExchangeableConfig::from_json(
    const nlohmann::json& j) {
  detail::require_keys(j,
                       {"mixture", "class", "epsilon", "delta", "n_grid",
                        "trials", "seed", "workers", "contrast_marginal"},
                       "verify-exchangeable config");
  VerifyExchangeableConfig c;
  c.mix = mixture_from_json(j.at("mixture"));
  read_if(j, "class", c.class_kind);
  read_if(j, "epsilon", c.epsilon);
  read_if(j, "delta", c.delta);
  read_if(j, "n_grid", c.n_grid);
  read_if(j, "trials", c.trials);
  if (j.contains("seed")) c.seed = seed_from_json(j.at("seed"));
  if (j.contains("workers")) c.workers = workers_from_json(j.at("workers"), 1);
  read_if(j, "contrast_marginal", c.contrast_marginal);
  return c;
}

nlohmann::json VerifyExchangeableConfig::to_json() const {
  nlohmann::json j;
  j["mixture"] = mixture_to_json(mix);
  j["class"] = class_kind;
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["n_grid"] = n_grid.empty() ? default_n_grid() : n_grid;
  j["trials"] = trials;
  j["seed"] = seed;
  j["contrast_marginal"] = contrast_marginal;
  return j;
}

ExperimentReport verify_exchangeable_corollary(
    const VerifyExchangeableConfig& config) {
  for (const ProcessLaw& c : config.mix.components) {
    if (c.kind != LawKind::Iid) {
      throw std::invalid_argument(
          "verify-exchangeable requires iid mixture components");
    }
  }
  const std::vector<Index> grid =
      config.n_grid.empty() ? default_n_grid() : config.n_grid;
  const FunctionClass cls =
      class_from_kind(config.class_kind, config.mix.alphabet);
  const Index comp_count = static_cast<Index>(config.mix.components.size());

  // Component runs are singleton mixtures with the same master seed, so a
  // component's trial-t path is identical to the mixture's whenever the
  // mixture picked that component.
  const SampleComplexityEstimate mix_run = sample_complexity(
      config.mix, cls, config.epsilon, config.delta, grid, config.trials,
      config.seed, TargetKind::Component, config.workers);
  std::vector<SampleComplexityEstimate> comp_runs;
  for (Index i = 0; i < comp_count; ++i) {
    const MixtureLaw single = mixture_law(
        {config.mix.components[static_cast<std::size_t>(i)]}, Vector::Ones(1));
    comp_runs.push_back(sample_complexity(single, cls, config.epsilon,
                                          config.delta, grid, config.trials,
                                          config.seed, TargetKind::Component,
                                          config.workers));
  }

  const Index sentinel = 2 * grid.back();
  const auto n_star_or = [&](const SampleComplexityEstimate& run) {
    return static_cast<double>(run.n_star.value_or(sentinel));
  };

  ExperimentReport report;
  report.experiment = "verify-exchangeable";
  report.config = config.to_json();
  report.tables.emplace_back("mixture_curve", mix_run.to_csv());
  std::string n_star_csv = "group,n_star,attained\n";
  const auto n_star_row = [&](const std::string& group,
                              const SampleComplexityEstimate& run) {
    n_star_csv += group + ",";
    if (run.n_star) n_star_csv += std::to_string(*run.n_star);
    n_star_csv += run.n_star ? ",1\n" : ",0\n";
  };
  n_star_row("mixture", mix_run);

  double max_comp = 0.0;
  for (Index i = 0; i < comp_count; ++i) {
    const auto& run = comp_runs[static_cast<std::size_t>(i)];
    report.tables.emplace_back("component_" + std::to_string(i) + "_curve",
                               run.to_csv());
    n_star_row("component_" + std::to_string(i), run);
    max_comp = std::max(max_comp, n_star_or(run));
    report.checks.push_back(
        check_le("component_" + std::to_string(i) + "_n_star_attained",
                 n_star_or(run), static_cast<double>(grid.back())));
  }
  report.checks.insert(
      report.checks.begin(),
      check_le("mixture_n_star_attained", n_star_or(mix_run),
               static_cast<double>(grid.back())));
  report.checks.push_back(
      check_le("mixture_n_star_le_max_component", n_star_or(mix_run),
               max_comp));

  if (config.contrast_marginal) {
    const SampleComplexityEstimate contrast = sample_complexity(
        config.mix, cls, config.epsilon, config.delta, grid, config.trials,
        config.seed, TargetKind::MixtureMarginal, config.workers);
    report.tables.emplace_back("contrast_curve", contrast.to_csv());
    n_star_row("contrast", contrast);
    report.checks.push_back(
        check_ge("contrast_n_star_absent", n_star_or(contrast),
                 static_cast<double>(grid.back() + 1)));
  }
  report.tables.emplace_back("n_star", n_star_csv);
  report.verdict = std::all_of(report.checks.begin(), report.checks.end(),
                               [](const CheckResult& c) { return c.pass; });
  return report;
}

VerifyMarFloorConfig VerifyMarFloorConfig::from_json(const nlohmann::json& j) {
  detail::require_keys(
      j,
      {"mixture", "lags", "past_len", "future_len", "trials", "bootstrap",
       "seed", "workers", "component_decay_threshold", "floor_slack",
       "mixture_min_at_max_lag"},
      "verify-mar-floor config");
  VerifyMarFloorConfig c;
  c.mix = mixture_from_json(j.at("mixture"));
  read_if(j, "lags", c.lags);
  read_if(j, "past_len", c.past_len);
  read_if(j, "future_len", c.future_len);
  read_if(j, "trials", c.trials);
  read_if(j, "bootstrap", c.bootstrap);
  if (j.contains("seed")) c.seed = seed_from_json(j.at("seed"));
  if (j.contains("workers")) c.workers = workers_from_json(j.at("workers"), 1);
  read_if(j, "component_decay_threshold", c.component_decay_threshold);
  read_if(j, "floor_slack", c.floor_slack);
  read_if(j, "mixture_min_at_max_lag", c.mixture_min_at_max_lag);
  return c;
}

nlohmann::json VerifyMarFloorConfig::to_json() const {
  nlohmann::json j;
  j["mixture"] = mixture_to_json(mix);
  j["lags"] = lags;
  j["past_len"] = past_len;
  j["future_len"] = future_len;
  j["trials"] = trials;
  j["bootstrap"] = bootstrap;
  j["seed"] = seed;
  j["component_decay_threshold"] = component_decay_threshold;
  j["floor_slack"] = floor_slack;
  j["mixture_min_at_max_lag"] = mixture_min_at_max_lag;
  return j;
}

ExperimentReport verify_mar_floor(const VerifyMarFloorConfig& config) {
  check_strictly_increasing(config.lags, 1, "lag grid");
  if (config.component_decay_threshold < 0.0 || config.floor_slack < 0.0) {
    throw std::invalid_argument("tolerances must be nonnegative");
  }
  const MixtureLaw& mix = config.mix;
  const double floor = beta_mixture_infinity(mix.weights);
  const int k_max = config.lags.back();
  const Index comp_count = static_cast<Index>(mix.components.size());

  ExperimentReport report;
  report.experiment = "verify-mar-floor";
  report.config = config.to_json();

  std::string comp_csv = "component,lag,beta\n";
  for (Index i = 0; i < comp_count; ++i) {
    const BetaCurve curve =
        beta_exact_curve(mix.components[static_cast<std::size_t>(i)],
                         config.lags);
    for (std::size_t li = 0; li < config.lags.size(); ++li) {
      comp_csv += std::to_string(i) + "," + std::to_string(config.lags[li]) +
                  "," + detail::fmt_double(curve.values[static_cast<Index>(li)]) +
                  "\n";
    }
    report.checks.push_back(
        check_le("component_" + std::to_string(i) + "_decay",
                 curve.values[curve.values.size() - 1],
                 config.component_decay_threshold));
  }

  std::string ens_csv = "lag,beta,stderr,occupied_cells\n";
  std::vector<BetaEstimate> estimates;
  for (std::size_t li = 0; li < config.lags.size(); ++li) {
    const BetaEstimate est = beta_empirical_ensemble(
        mix, config.lags[li], config.past_len, config.future_len,
        config.trials, derive_seed(config.seed, streams::kGrid, li),
        config.bootstrap, config.workers);
    estimates.push_back(est);
    ens_csv += std::to_string(config.lags[li]) + "," +
               detail::fmt_double(est.estimate) + "," +
               detail::fmt_double(est.se) + "," +
               std::to_string(est.occupied_cells) + "\n";
    report.checks.push_back(check_ge(
        "floor_lower(k=" + std::to_string(config.lags[li]) + ")", est.estimate,
        floor - 2.0 * est.se - config.floor_slack));
  }
  const BetaEstimate& last = estimates.back();
  // Plug-in TV is biased upward; the allowance scales with how thinly the
  // joint table is spread over its occupied cells.
  const double bias_allowance =
      static_cast<double>(last.occupied_cells) /
      (2.0 * static_cast<double>(config.trials));
  report.checks.push_back(check_le(
      "floor_upper(k=" + std::to_string(k_max) + ")", last.estimate,
      floor + 2.0 * last.se + bias_allowance + config.floor_slack));
  if (config.mixture_min_at_max_lag >= 0.0) {
    report.checks.push_back(check_ge(
        "mixture_min(k=" + std::to_string(k_max) + ")", last.estimate,
        config.mixture_min_at_max_lag));
  }

  report.tables.emplace_back("ensemble", ens_csv);
  report.tables.emplace_back("component_beta", comp_csv);
  report.tables.emplace_back(
      "floor", std::string("floor\n") + detail::fmt_double(floor) + "\n");
  report.verdict = std::all_of(report.checks.begin(), report.checks.end(),
                               [](const CheckResult& c) { return c.pass; });
  return report;
}

VerifyMarCriterionConfig VerifyMarCriterionConfig::from_json(
    const nlohmann::json& j) {
  detail::require_keys(j,
                       {"mixture", "n_grid", "k_grid", "l_grid", "window",
                        "trials", "seed", "workers", "floor_fraction"},
                       "verify-mar-criterion config");
  VerifyMarCriterionConfig c;
  c.mix = mixture_from_json(j.at("mixture"));
  read_if(j, "n_grid", c.n_grid);
  read_if(j, "k_grid", c.k_grid);
  read_if(j, "l_grid", c.l_grid);
  read_if(j, "window", c.window);
  read_if(j, "trials", c.trials);
  if (j.contains("seed")) c.seed = seed_from_json(j.at("seed"));
  if (j.contains("workers")) c.workers = workers_from_json(j.at("workers"), 1);
  read_if(j, "floor_fraction", c.floor_fraction);
  return c;
}

nlohmann::json VerifyMarCriterionConfig::to_json() const {
  nlohmann::json j;
  j["mixture"] = mixture_to_json(mix);
  j["n_grid"] = n_grid;
  j["k_grid"] = k_grid;
  j["l_grid"] = l_grid;
  j["window"] = window;
  j["trials"] = trials;
  j["seed"] = seed;
  j["floor_fraction"] = floor_fraction;
  return j;
}

ExperimentReport verify_mar_criterion(const VerifyMarCriterionConfig& config) {
  if (config.n_grid.empty()) {
    throw std::invalid_argument("n grid must be nonempty");
  }
  Index prev_n = -1;
  for (Index n : config.n_grid) {
    if (n < 0 || n <= prev_n) {
      throw std::invalid_argument(
          "n grid must be nonnegative and strictly increasing");
    }
    prev_n = n;
  }
  check_strictly_increasing(config.k_grid, 1, "k grid");
  check_strictly_increasing(config.l_grid, 1, "l grid");
  if (config.window < 1) throw std::invalid_argument("window must be >= 1");
  if (config.trials < 100) {
    throw std::invalid_argument("criterion estimate needs at least 100 trials");
  }
  if (!(config.floor_fraction >= 0.0 && config.floor_fraction <= 1.0)) {
    throw std::invalid_argument("floor fraction must lie in [0,1]");
  }

  const MixtureLaw& mix = config.mix;
  const int a = mix.alphabet.size;
  const Index comp_count = static_cast<Index>(mix.components.size());
  const int l_max = config.l_grid.back();
  const int k_max = config.k_grid.back();
  const double floor = beta_mixture_infinity(mix.weights);

  // Supremum over events of the future window: all events when the window
  // state space is small, otherwise only single-coordinate events.
  bool full_events = true;
  {
    Index cells = 1;
    for (int i = 0; i < config.window; ++i) {
      cells *= a;
      if (cells > (Index{1} << 16)) {
        full_events = false;
        break;
      }
    }
  }

  std::vector<MarkovKernel> kernels;
  std::vector<Matrix> log_step;
  std::vector<Vector> log_init;
  for (const ProcessLaw& comp : mix.components) {
    kernels.push_back(as_kernel(comp));
    const MarkovKernel& k = kernels.back();
    log_step.push_back(k.transition.array().log().matrix());
    log_init.push_back(k.initial.array().log().matrix());
  }
  Vector log_weights(comp_count);
  for (Index i = 0; i < comp_count; ++i) {
    log_weights[i] = std::log(mix.weights[i]);
  }

  // Transition powers P^g for every gap that can occur; in coordinate mode
  // the window coordinates extend the reach by window - 1 steps.
  const int g_max = k_max + l_max + (full_events ? 0 : config.window - 1);
  std::vector<std::vector<Matrix>> powers(
      static_cast<std::size_t>(comp_count));
  for (Index i = 0; i < comp_count; ++i) {
    auto& pw = powers[static_cast<std::size_t>(i)];
    pw.reserve(static_cast<std::size_t>(g_max) + 1);
    pw.push_back(Matrix::Identity(a, a));
    const Matrix& step = kernels[static_cast<std::size_t>(i)].transition;
    for (int g = 1; g <= g_max; ++g) pw.push_back(pw.back() * step);
  }

  // Full-event mode: window law for every (component, gap, start symbol),
  // plus the stationary window per component.
  std::vector<std::vector<Matrix>> win;  // [comp][gap] -> rows by start symbol
  std::vector<Vector> win_stat;
  if (full_events) {
    win.resize(static_cast<std::size_t>(comp_count));
    for (Index i = 0; i < comp_count; ++i) {
      const MarkovKernel& k = kernels[static_cast<std::size_t>(i)];
      auto& per_gap = win[static_cast<std::size_t>(i)];
      per_gap.resize(static_cast<std::size_t>(g_max) + 1);
      for (int g = 1; g <= g_max; ++g) {
        Matrix rows(a, window_count(a, config.window));
        for (int s = 0; s < a; ++s) {
          rows.row(s) = window_law(
              powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(g)]
                  .row(s)
                  .transpose(),
              k.transition, config.window, a)
                  .transpose();
        }
        per_gap[static_cast<std::size_t>(g)] = std::move(rows);
      }
      win_stat.push_back(
          window_law(k.initial, k.transition, config.window, a));
    }
  }

  const Index stat_rows = static_cast<Index>(config.k_grid.size());
  std::string stat_csv = "n,k,stat,stderr\n";
  Matrix stat_mean(static_cast<Index>(config.n_grid.size()), stat_rows);
  Matrix stat_se(static_cast<Index>(config.n_grid.size()), stat_rows);

  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    const Index n = config.n_grid[ni];
    const Index path_len = n + l_max;
    const std::uint64_t base_seed =
        derive_seed(config.seed, streams::kGrid, ni);
    Matrix samples(config.trials, stat_rows);
    parallel_for(config.trials, config.workers, [&](Index t) {
      const SamplePath path = sample_mixture(
          mix, path_len,
          derive_seed(base_seed, streams::kTrial,
                      static_cast<std::uint64_t>(t)));
      // Component log likelihoods of the past block.
      Vector ll(comp_count);
      for (Index i = 0; i < comp_count; ++i) {
        double acc = log_weights[i];
        for (Index u = 0; u < n; ++u) {
          const int s = path.symbols[u];
          acc += u == 0 ? log_init[static_cast<std::size_t>(i)][s]
                        : log_step[static_cast<std::size_t>(i)](
                              path.symbols[u - 1], s);
        }
        ll[i] = acc;
      }
      const Vector post2 = softmax_from_log(ll);
      const int last_past = n > 0 ? path.symbols[n - 1] : -1;

      // Future-window law under the past-only conditioning, at gap g from
      // the end of the past (stationary when there is no past).
      const auto cond_past = [&](int g) {
        Vector out = Vector::Zero(win_stat.front().size());
        for (Index i = 0; i < comp_count; ++i) {
          if (post2[i] == 0.0) continue;
          if (n > 0) {
            out += post2[i] * win[static_cast<std::size_t>(i)]
                                 [static_cast<std::size_t>(g)]
                                     .row(last_past)
                                     .transpose();
          } else {
            out += post2[i] * win_stat[static_cast<std::size_t>(i)];
          }
        }
        return out;
      };

      Vector running_ll = ll;
      std::vector<double> best(static_cast<std::size_t>(stat_rows), 0.0);
      std::size_t next_l = 0;
      for (int l = 1; l <= l_max; ++l) {
        const Index pos = n + l - 1;
        const int s = path.symbols[pos];
        for (Index i = 0; i < comp_count; ++i) {
          if (pos == 0) {
            running_ll[i] += log_init[static_cast<std::size_t>(i)][s];
          } else {
            running_ll[i] += log_step[static_cast<std::size_t>(i)](
                path.symbols[pos - 1], s);
          }
        }
        if (next_l >= config.l_grid.size() || config.l_grid[next_l] != l) {
          continue;
        }
        ++next_l;
        const Vector post1 = softmax_from_log(running_ll);
        const int last_block = path.symbols[n + l - 1];
        for (Index ki = 0; ki < stat_rows; ++ki) {
          const int k = config.k_grid[static_cast<std::size_t>(ki)];
          double sup = 0.0;
          if (full_events) {
            Vector cond1 = Vector::Zero(win_stat.front().size());
            for (Index i = 0; i < comp_count; ++i) {
              if (post1[i] == 0.0) continue;
              cond1 += post1[i] * win[static_cast<std::size_t>(i)]
                                     [static_cast<std::size_t>(k)]
                                         .row(last_block)
                                         .transpose();
            }
            sup = one_sided_sup(cond1, cond_past(k + l));
          } else {
            for (int j = 0; j < config.window; ++j) {
              Vector m1 = Vector::Zero(a);
              Vector m2 = Vector::Zero(a);
              for (Index i = 0; i < comp_count; ++i) {
                const auto& pw = powers[static_cast<std::size_t>(i)];
                if (post1[i] > 0.0) {
                  m1 += post1[i] *
                        pw[static_cast<std::size_t>(k + j)].row(last_block)
                            .transpose();
                }
                if (post2[i] > 0.0) {
                  if (n > 0) {
                    m2 += post2[i] * pw[static_cast<std::size_t>(k + l + j)]
                                         .row(last_past)
                                         .transpose();
                  } else {
                    m2 += post2[i] * kernels[static_cast<std::size_t>(i)].initial;
                  }
                }
              }
              sup = std::max(sup, one_sided_sup(m1, m2));
            }
          }
          best[static_cast<std::size_t>(ki)] =
              std::max(best[static_cast<std::size_t>(ki)], sup);
        }
      }
      for (Index ki = 0; ki < stat_rows; ++ki) {
        samples(t, ki) = best[static_cast<std::size_t>(ki)];
      }
    });
    for (Index ki = 0; ki < stat_rows; ++ki) {
      const Vector col = samples.col(ki);
      stat_mean(static_cast<Index>(ni), ki) = col.mean();
      stat_se(static_cast<Index>(ni), ki) =
          sample_sd(col) / std::sqrt(static_cast<double>(config.trials));
      stat_csv += std::to_string(n) + "," +
                  std::to_string(config.k_grid[static_cast<std::size_t>(ki)]) +
                  "," + detail::fmt_double(stat_mean(static_cast<Index>(ni),
                                                     ki)) +
                  "," +
                  detail::fmt_double(stat_se(static_cast<Index>(ni), ki)) +
                  "\n";
    }
  }

  ExperimentReport report;
  report.experiment = "verify-mar-criterion";
  report.config = config.to_json();
  report.config["events_mode"] =
      full_events ? "full_window" : "single_coordinate";

  std::string env_csv = "k,beta_envelope\n";
  const Index last_n = static_cast<Index>(config.n_grid.size()) - 1;
  for (std::size_t ki = 0; ki < config.k_grid.size(); ++ki) {
    const int k = config.k_grid[ki];
    double envelope = 0.0;
    for (const ProcessLaw& comp : mix.components) {
      envelope = std::max(envelope, beta_exact_markov(comp, k));
    }
    env_csv += std::to_string(k) + "," + detail::fmt_double(envelope) + "\n";
    report.checks.push_back(check_ge(
        "small_n(k=" + std::to_string(k) + ")",
        stat_mean(0, static_cast<Index>(ki)),
        config.floor_fraction * floor));
    report.checks.push_back(check_le(
        "large_n(k=" + std::to_string(k) + ")",
        stat_mean(last_n, static_cast<Index>(ki)),
        2.0 * envelope + 3.0 * stat_se(last_n, static_cast<Index>(ki))));
  }
  report.tables.emplace_back("statistic", stat_csv);
  report.tables.emplace_back("envelope", env_csv);
  report.verdict = std::all_of(report.checks.begin(), report.checks.end(),
                               [](const CheckResult& c) { return c.pass; });
  return report;
}

}  // namespace mixlearn
