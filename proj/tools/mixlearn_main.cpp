#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mixlearn/dependence.hpp"
#include "mixlearn/harness.hpp"
#include "mixlearn/learning.hpp"
#include "mixlearn/parallel.hpp"
#include "mixlearn/process.hpp"
#include "mixlearn/rng.hpp"

namespace {

using namespace mixlearn;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  f >> j;
  return j;
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw std::runtime_error("cannot write " + path);
}

// "a..b" inclusive range or comma-separated list.
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const int a = std::stoi(text.substr(0, range));
    const int b = std::stoi(text.substr(range + 2));
    for (int k = a; k <= b; ++k) out.push_back(k);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const std::string item =
          text.substr(pos, comma == std::string::npos ? comma : comma - pos);
      if (!item.empty()) out.push_back(std::stoi(item));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

MixtureLaw load_mixture(const std::string& law_file,
                        const std::string& mixture_file) {
  if (law_file.empty() == mixture_file.empty()) {
    throw std::invalid_argument("give exactly one of --law and --mixture");
  }
  if (!mixture_file.empty()) {
    return mixture_from_json(read_json_file(mixture_file));
  }
  return mixture_law({law_from_json(read_json_file(law_file))},
                     Vector::Ones(1));
}

Vector make_vector(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Built-in experiment configs; every field can be overridden through a
// config file or flags.
VerifyMixtureConfig default_mixture_config() {
  const Alphabet ab{2};
  VerifyMixtureConfig c;
  c.mix = mixture_law({iid_law(ab, make_vector({0.2, 0.8})),
                       iid_law(ab, make_vector({0.8, 0.2}))},
                      make_vector({0.5, 0.5}));
  return c;
}

VerifyExchangeableConfig default_exchangeable_config() {
  const Alphabet ab{2};
  VerifyExchangeableConfig c;
  c.mix = mixture_law({iid_law(ab, make_vector({0.1, 0.9})),
                       iid_law(ab, make_vector({0.9, 0.1}))},
                      make_vector({0.5, 0.5}));
  return c;
}

MixtureLaw two_chain_mixture() {
  const Alphabet ab{2};
  Matrix sticky(2, 2), flippy(2, 2);
  sticky << 0.9, 0.1, 0.1, 0.9;
  flippy << 0.1, 0.9, 0.9, 0.1;
  return mixture_law({markov_law(ab, sticky), markov_law(ab, flippy)},
                     make_vector({0.5, 0.5}));
}

VerifyMarFloorConfig default_mar_floor_config() {
  VerifyMarFloorConfig c;
  c.mix = two_chain_mixture();
  c.lags = {1, 2, 5, 10, 20, 30};
  c.past_len = 8;
  c.future_len = 8;
  c.component_decay_threshold = 1e-3;
  c.floor_slack = 0.02;
  c.mixture_min_at_max_lag = 0.4;
  return c;
}

VerifyMarCriterionConfig default_mar_criterion_config() {
  VerifyMarCriterionConfig c;
  c.mix = two_chain_mixture();
  return c;
}

struct CommonFlags {
  std::string config_file;
  std::string out_dir;
  std::uint64_t seed = kDefaultSeed;
  Index trials = 0;
  int workers = 0;
  bool seed_set = false;
  bool trials_set = false;
  bool workers_set = false;
};

void add_common(CLI::App* sub, CommonFlags& flags,
                const std::string& default_out) {
  flags.out_dir = default_out;
  sub->add_option("--config", flags.config_file,
                  "json config file (built-in defaults when omitted)");
  sub->add_option("--out", flags.out_dir, "output directory")
      ->capture_default_str();
  sub->add_option("--seed", flags.seed, "master seed")->capture_default_str();
  sub->add_option("--trials", flags.trials, "Monte Carlo trials");
  sub->add_option("--workers", flags.workers,
                  "worker threads (default: available parallelism)");
}

void note_overrides(const CLI::App* sub, CommonFlags& flags) {
  flags.seed_set = sub->count("--seed") > 0;
  flags.trials_set = sub->count("--trials") > 0;
  flags.workers_set = sub->count("--workers") > 0;
}

// Flags beat config-file fields; the worker count falls back to the
// machine's parallelism and never changes results.
template <class Config>
void apply_overrides(Config& config, const CommonFlags& flags,
                     bool config_had_workers) {
  if (flags.seed_set) config.seed = flags.seed;
  if (flags.trials_set) config.trials = flags.trials;
  if (flags.workers_set) {
    config.workers = flags.workers;
  } else if (!config_had_workers) {
    config.workers = default_workers();
  }
}

template <class Config>
Config resolve_config(const CommonFlags& flags, Config (*defaults)(),
                      Config (*from_json)(const nlohmann::json&)) {
  bool had_workers = false;
  Config config;
  if (flags.config_file.empty()) {
    config = defaults();
  } else {
    const nlohmann::json j = read_json_file(flags.config_file);
    config = from_json(j);
    had_workers = j.contains("workers");
  }
  apply_overrides(config, flags, had_workers);
  return config;
}

int emit_report(const ExperimentReport& report, const std::string& out_dir,
                std::chrono::steady_clock::time_point started) {
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  std::cerr << "[" << report.experiment << "] finished in " << elapsed.count()
            << " ms\n";
  report.write(out_dir);
  for (const CheckResult& c : report.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << report.experiment << " "
              << c.name << ": " << c.value << " " << c.relation << " "
              << c.bound << "\n";
  }
  std::cout << report.experiment << " verdict: "
            << (report.verdict ? "pass" : "fail") << " (" << out_dir
            << "/report.json)\n";
  return report.verdict ? 0 : 1;
}

template <class Config>
int run_experiment(const CommonFlags& flags, Config (*defaults)(),
                   Config (*from_json)(const nlohmann::json&),
                   ExperimentReport (*op)(const Config&)) {
  const Config config = resolve_config(flags, defaults, from_json);
  const auto started = std::chrono::steady_clock::now();
  return emit_report(op(config), flags.out_dir, started);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation laboratory for learning over mixtures of ergodic "
      "processes: exact and empirical dependence coefficients, "
      "worst-case empirical gaps over finite classes, and reproducible "
      "verification experiments.\nDefault master seed: 1729."};
  app.require_subcommand(1);
  int exit_code = 0;

  // sample
  struct {
    std::string law_file, mixture_file, out = "path.json";
    Index n = 100;
    std::uint64_t seed = kDefaultSeed;
  } sample_opts;
  auto* sample_cmd =
      app.add_subcommand("sample", "draw one path and write it as json");
  sample_cmd->add_option("--law", sample_opts.law_file, "component law json");
  sample_cmd->add_option("--mixture", sample_opts.mixture_file,
                         "mixture law json");
  sample_cmd->add_option("--n", sample_opts.n, "path length")
      ->capture_default_str();
  sample_cmd->add_option("--seed", sample_opts.seed, "seed")
      ->capture_default_str();
  sample_cmd->add_option("--out", sample_opts.out, "output file")
      ->capture_default_str();
  sample_cmd->callback([&] {
    const MixtureLaw mix =
        load_mixture(sample_opts.law_file, sample_opts.mixture_file);
    const SamplePath path = sample_mixture(mix, sample_opts.n,
                                           sample_opts.seed);
    write_text(sample_opts.out, path_to_json(path).dump(2) + "\n");
    std::cout << "sample: n=" << sample_opts.n
              << " component=" << *path.component_index << " -> "
              << sample_opts.out << "\n";
  });

  // beta
  struct {
    std::string law_file, mixture_file, lags = "1..10", out = "beta.csv";
    int past = 1, future = 1, bootstrap = 200;
    Index trials = 10000;
    std::uint64_t seed = kDefaultSeed;
    int workers = 0;
  } beta_opts;
  auto* beta_cmd = app.add_subcommand(
      "beta",
      "dependence curve: exact for --law, ensemble estimate for --mixture");
  beta_cmd->add_option("--law", beta_opts.law_file, "component law json");
  beta_cmd->add_option("--mixture", beta_opts.mixture_file,
                       "mixture law json");
  beta_cmd->add_option("--k", beta_opts.lags, "lags, e.g. 1..10 or 1,5,20")
      ->capture_default_str();
  beta_cmd->add_option("--past", beta_opts.past, "past window length")
      ->capture_default_str();
  beta_cmd->add_option("--future", beta_opts.future, "future window length")
      ->capture_default_str();
  beta_cmd->add_option("--trials", beta_opts.trials,
                       "ensemble paths (mixture mode)")
      ->capture_default_str();
  beta_cmd->add_option("--bootstrap", beta_opts.bootstrap,
                       "bootstrap resamples (mixture mode)")
      ->capture_default_str();
  beta_cmd->add_option("--seed", beta_opts.seed, "seed")->capture_default_str();
  beta_cmd->add_option("--workers", beta_opts.workers,
                       "worker threads (default: available parallelism)");
  beta_cmd->add_option("--out", beta_opts.out, "output csv")
      ->capture_default_str();
  beta_cmd->callback([&] {
    const std::vector<int> lags = parse_int_list(beta_opts.lags);
    BetaCurve curve;
    if (!beta_opts.law_file.empty() && beta_opts.mixture_file.empty()) {
      curve = beta_exact_curve(law_from_json(read_json_file(
                                   beta_opts.law_file)),
                               lags);
    } else {
      const MixtureLaw mix =
          load_mixture(beta_opts.law_file, beta_opts.mixture_file);
      const int workers = beta_cmd->count("--workers") > 0
                              ? beta_opts.workers
                              : default_workers();
      curve.lags = lags;
      curve.mode = BetaCurve::Mode::Estimated;
      curve.values.resize(static_cast<Index>(lags.size()));
      curve.se.resize(static_cast<Index>(lags.size()));
      for (std::size_t i = 0; i < lags.size(); ++i) {
        const BetaEstimate est = beta_empirical_ensemble(
            mix, lags[i], beta_opts.past, beta_opts.future, beta_opts.trials,
            derive_seed(beta_opts.seed, streams::kGrid, i),
            beta_opts.bootstrap, workers);
        curve.values[static_cast<Index>(i)] = est.estimate;
        curve.se[static_cast<Index>(i)] = est.se;
      }
    }
    write_text(beta_opts.out, curve.to_csv());
    std::cout << "beta: mode="
              << (curve.mode == BetaCurve::Mode::Exact ? "exact" : "estimated")
              << " k=" << lags.front() << ".." << lags.back()
              << " first=" << curve.values[0]
              << " last=" << curve.values[curve.values.size() - 1] << " -> "
              << beta_opts.out << "\n";
  });

  // gamma
  struct {
    std::string law_file, mixture_file, class_kind = "thresholds",
                          target = "component", out = "gap.json";
    Index n = 500;
    std::uint64_t seed = kDefaultSeed;
  } gamma_opts;
  auto* gamma_cmd = app.add_subcommand(
      "gamma",
      "worst-case gap over a class between one path's averages and target "
      "expectations");
  gamma_cmd->add_option("--law", gamma_opts.law_file, "component law json");
  gamma_cmd->add_option("--mixture", gamma_opts.mixture_file,
                        "mixture law json");
  gamma_cmd
      ->add_option("--class", gamma_opts.class_kind,
                   "thresholds or intervals")
      ->capture_default_str();
  gamma_cmd
      ->add_option("--target", gamma_opts.target,
                   "component (generating component's expectations) or "
                   "marginal (mixture-wide)")
      ->capture_default_str();
  gamma_cmd->add_option("--n", gamma_opts.n, "path length")
      ->capture_default_str();
  gamma_cmd->add_option("--seed", gamma_opts.seed, "seed")
      ->capture_default_str();
  gamma_cmd->add_option("--out", gamma_opts.out, "output json")
      ->capture_default_str();
  gamma_cmd->callback([&] {
    const MixtureLaw mix =
        load_mixture(gamma_opts.law_file, gamma_opts.mixture_file);
    const FunctionClass cls = gamma_opts.class_kind == "thresholds"
                                  ? thresholds_class(mix.alphabet)
                              : gamma_opts.class_kind == "intervals"
                                  ? intervals_class(mix.alphabet)
                                  : throw std::invalid_argument(
                                        "unknown class kind \"" +
                                        gamma_opts.class_kind + "\"");
    const SamplePath path = sample_mixture(mix, gamma_opts.n, gamma_opts.seed);
    Vector target;
    if (gamma_opts.target == "component") {
      target = marginal_distribution(
          mix.components[static_cast<std::size_t>(*path.component_index)]);
    } else if (gamma_opts.target == "marginal") {
      target = mixture_marginal(mix);
    } else {
      throw std::invalid_argument("target must be component or marginal");
    }
    const RiskReport report = gap_report(path, cls, target);
    nlohmann::json j;
    j["class"] = gamma_opts.class_kind;
    j["target"] = gamma_opts.target;
    j["n"] = gamma_opts.n;
    j["seed"] = gamma_opts.seed;
    j["component_index"] = *path.component_index;
    j["sup_gap"] = report.sup_gap;
    j["argmax_member"] = cls.labels[static_cast<std::size_t>(
        report.argmax_index)];
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < cls.size(); ++i) {
      nlohmann::json row;
      row["member"] = cls.labels[static_cast<std::size_t>(i)];
      row["empirical"] = report.empirical_means[i];
      row["target"] = report.targets[i];
      rows.push_back(row);
    }
    j["members"] = rows;
    write_text(gamma_opts.out, j.dump(2) + "\n");
    std::cout << "gap: sup=" << report.sup_gap << " at "
              << cls.labels[static_cast<std::size_t>(report.argmax_index)]
              << " (n=" << gamma_opts.n << ", target=" << gamma_opts.target
              << ") -> " << gamma_opts.out << "\n";
  });

  // erm
  struct {
    std::string law_file, mixture_file, class_kind = "thresholds",
                          out = "erm.json";
    Index n = 500;
    std::uint64_t seed = kDefaultSeed;
  } erm_opts;
  auto* erm_cmd = app.add_subcommand(
      "erm", "empirical risk minimizer over a class on one sampled path");
  erm_cmd->add_option("--law", erm_opts.law_file, "component law json");
  erm_cmd->add_option("--mixture", erm_opts.mixture_file, "mixture law json");
  erm_cmd->add_option("--class", erm_opts.class_kind, "thresholds or intervals")
      ->capture_default_str();
  erm_cmd->add_option("--n", erm_opts.n, "path length")->capture_default_str();
  erm_cmd->add_option("--seed", erm_opts.seed, "seed")->capture_default_str();
  erm_cmd->add_option("--out", erm_opts.out, "output json")
      ->capture_default_str();
  erm_cmd->callback([&] {
    const MixtureLaw mix =
        load_mixture(erm_opts.law_file, erm_opts.mixture_file);
    const FunctionClass cls = erm_opts.class_kind == "thresholds"
                                  ? thresholds_class(mix.alphabet)
                              : erm_opts.class_kind == "intervals"
                                  ? intervals_class(mix.alphabet)
                                  : throw std::invalid_argument(
                                        "unknown class kind \"" +
                                        erm_opts.class_kind + "\"");
    const SamplePath path = sample_mixture(mix, erm_opts.n, erm_opts.seed);
    const Vector target = marginal_distribution(
        mix.components[static_cast<std::size_t>(*path.component_index)]);
    const RiskReport report = gap_report(path, cls, target);
    const ErmResult result = erm(path, cls);
    const double gap = erm_risk_gap(report, result.index);
    nlohmann::json j;
    j["class"] = erm_opts.class_kind;
    j["n"] = erm_opts.n;
    j["seed"] = erm_opts.seed;
    j["component_index"] = *path.component_index;
    j["member"] = cls.labels[static_cast<std::size_t>(result.index)];
    j["empirical_risk"] = result.empirical_risk;
    j["risk_gap"] = gap;
    j["sup_gap"] = report.sup_gap;
    write_text(erm_opts.out, j.dump(2) + "\n");
    std::cout << "erm: member="
              << cls.labels[static_cast<std::size_t>(result.index)]
              << " empirical_risk=" << result.empirical_risk
              << " risk_gap=" << gap << " (<= " << 2.0 * report.sup_gap
              << ") -> " << erm_opts.out << "\n";
  });

  // complexity
  struct {
    std::string law_file, mixture_file, class_kind = "thresholds",
                          target = "component", n_grid, out = "out/complexity";
    double epsilon = 0.1, delta = 0.05;
    Index trials = 1000;
    std::uint64_t seed = kDefaultSeed;
    int workers = 0;
  } cx_opts;
  auto* cx_cmd = app.add_subcommand(
      "complexity", "failure-rate curve over a length grid and the smallest "
                    "passing length");
  cx_cmd->add_option("--law", cx_opts.law_file, "component law json");
  cx_cmd->add_option("--mixture", cx_opts.mixture_file, "mixture law json");
  cx_cmd->add_option("--class", cx_opts.class_kind, "thresholds or intervals")
      ->capture_default_str();
  cx_cmd->add_option("--target", cx_opts.target, "component or marginal")
      ->capture_default_str();
  cx_cmd->add_option("--epsilon", cx_opts.epsilon, "accuracy")
      ->capture_default_str();
  cx_cmd->add_option("--delta", cx_opts.delta, "confidence")
      ->capture_default_str();
  cx_cmd->add_option("--n-grid", cx_opts.n_grid,
                     "lengths, e.g. 32,64,128 (default: powers of two "
                     "32..16384)");
  cx_cmd->add_option("--trials", cx_opts.trials, "trials per length")
      ->capture_default_str();
  cx_cmd->add_option("--seed", cx_opts.seed, "seed")->capture_default_str();
  cx_cmd->add_option("--workers", cx_opts.workers,
                     "worker threads (default: available parallelism)");
  cx_cmd->add_option("--out", cx_opts.out, "output directory")
      ->capture_default_str();
  cx_cmd->callback([&] {
    const MixtureLaw mix =
        load_mixture(cx_opts.law_file, cx_opts.mixture_file);
    const FunctionClass cls = cx_opts.class_kind == "thresholds"
                                  ? thresholds_class(mix.alphabet)
                              : cx_opts.class_kind == "intervals"
                                  ? intervals_class(mix.alphabet)
                                  : throw std::invalid_argument(
                                        "unknown class kind \"" +
                                        cx_opts.class_kind + "\"");
    std::vector<Index> grid;
    if (cx_opts.n_grid.empty()) {
      grid = default_n_grid();
    } else {
      for (int n : parse_int_list(cx_opts.n_grid)) grid.push_back(n);
    }
    const TargetKind target = cx_opts.target == "component"
                                  ? TargetKind::Component
                              : cx_opts.target == "marginal"
                                  ? TargetKind::MixtureMarginal
                                  : throw std::invalid_argument(
                                        "target must be component or marginal");
    const int workers = cx_cmd->count("--workers") > 0 ? cx_opts.workers
                                                       : default_workers();
    const SampleComplexityEstimate est =
        sample_complexity(mix, cls, cx_opts.epsilon, cx_opts.delta, grid,
                          cx_opts.trials, cx_opts.seed, target, workers);
    write_text(cx_opts.out + "/complexity.csv", est.to_csv());
    nlohmann::json sidecar;
    sidecar["epsilon"] = est.epsilon;
    sidecar["delta"] = est.delta;
    sidecar["class"] = cx_opts.class_kind;
    sidecar["target"] = cx_opts.target;
    sidecar["mixture"] = mixture_to_json(mix);
    sidecar["seed"] = cx_opts.seed;
    sidecar["trials"] = est.trials;
    if (est.n_star) {
      sidecar["n_star"] = *est.n_star;
    } else {
      sidecar["n_star"] = nullptr;
    }
    write_text(cx_opts.out + "/complexity.json", sidecar.dump(2) + "\n");
    std::cout << "complexity: ";
    if (est.n_star) {
      std::cout << "n_star=" << *est.n_star;
    } else {
      std::cout << "n_star absent on the tested grid";
    }
    std::cout << " (epsilon=" << est.epsilon << ", delta=" << est.delta
              << ") -> " << cx_opts.out << "\n";
  });

  // verify experiments
  CommonFlags vm_flags, ve_flags, vf_flags, vc_flags;
  auto* vm_cmd = app.add_subcommand(
      "verify-mixture",
      "failure-rate identity between a mixture and its components");
  add_common(vm_cmd, vm_flags, "out/verify-mixture");
  vm_cmd->callback([&] {
    note_overrides(vm_cmd, vm_flags);
    exit_code = run_experiment<VerifyMixtureConfig>(
        vm_flags, &default_mixture_config, &VerifyMixtureConfig::from_json,
        &verify_mixture_theorem);
  });

  auto* ve_cmd = app.add_subcommand(
      "verify-exchangeable",
      "sample-complexity parity for an all-iid mixture");
  add_common(ve_cmd, ve_flags, "out/verify-exchangeable");
  ve_cmd->callback([&] {
    note_overrides(ve_cmd, ve_flags);
    exit_code = run_experiment<VerifyExchangeableConfig>(
        ve_flags, &default_exchangeable_config,
        &VerifyExchangeableConfig::from_json, &verify_exchangeable_corollary);
  });

  auto* vf_cmd = app.add_subcommand(
      "verify-mar-floor",
      "component dependence decay against the mixture weight floor");
  add_common(vf_cmd, vf_flags, "out/verify-mar-floor");
  vf_cmd->callback([&] {
    note_overrides(vf_cmd, vf_flags);
    exit_code = run_experiment<VerifyMarFloorConfig>(
        vf_flags, &default_mar_floor_config, &VerifyMarFloorConfig::from_json,
        &verify_mar_floor);
  });

  auto* vc_cmd = app.add_subcommand(
      "verify-mar-criterion",
      "mixture-identification statistic across past lengths and lags");
  add_common(vc_cmd, vc_flags, "out/verify-mar-criterion");
  vc_cmd->callback([&] {
    note_overrides(vc_cmd, vc_flags);
    exit_code = run_experiment<VerifyMarCriterionConfig>(
        vc_flags, &default_mar_criterion_config,
        &VerifyMarCriterionConfig::from_json, &verify_mar_criterion);
  });

  // all
  struct {
    std::string out = "out";
    std::uint64_t seed = kDefaultSeed;
    int workers = 0;
  } all_opts;
  auto* all_cmd = app.add_subcommand(
      "all", "run every verification experiment with built-in configs");
  all_cmd->add_option("--out", all_opts.out, "output directory")
      ->capture_default_str();
  all_cmd->add_option("--seed", all_opts.seed, "master seed")
      ->capture_default_str();
  all_cmd->add_option("--workers", all_opts.workers,
                      "worker threads (default: available parallelism)");
  all_cmd->callback([&] {
    const int workers = all_cmd->count("--workers") > 0
                            ? all_opts.workers
                            : default_workers();
    const bool seed_set = all_cmd->count("--seed") > 0;
    int worst = 0;
    const auto run = [&](const std::string& name, auto config, auto op) {
      config.workers = workers;
      if (seed_set) config.seed = all_opts.seed;
      std::cout << "== " << name << " ==\n";
      const auto started = std::chrono::steady_clock::now();
      worst = std::max(worst,
                       emit_report(op(config), all_opts.out + "/" + name,
                                   started));
    };
    run("verify-mixture", default_mixture_config(), &verify_mixture_theorem);
    run("verify-exchangeable", default_exchangeable_config(),
        &verify_exchangeable_corollary);
    run("verify-mar-floor", default_mar_floor_config(), &verify_mar_floor);
    run("verify-mar-criterion", default_mar_criterion_config(),
        &verify_mar_criterion);
    std::cout << "all: " << (worst == 0 ? "pass" : "fail") << "\n";
    exit_code = worst;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
