#include "mixlearn/learning.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "format_util.hpp"
#include "mixlearn/parallel.hpp"
#include "mixlearn/rng.hpp"

namespace mixlearn {

namespace {

void check_class(const FunctionClass& cls) {
  if (cls.size() < 1) throw std::invalid_argument("function class is empty");
  if (cls.members.cols() != cls.alphabet.size) {
    throw std::invalid_argument("function class table mismatches alphabet");
  }
}

// Empirical symbol frequencies; validates symbols against the alphabet.
Vector empirical_distribution(const SamplePath& path, Alphabet alphabet) {
  const Index n = path.symbols.size();
  if (n < 1) throw std::invalid_argument("path is empty");
  Vector h = Vector::Zero(alphabet.size);
  for (Index t = 0; t < n; ++t) {
    const int s = path.symbols[t];
    if (s < 0 || s >= alphabet.size) {
      throw std::invalid_argument("path symbol outside the class alphabet");
    }
    h[s] += 1.0;
  }
  return h / static_cast<double>(n);
}

Index lowest_argmax(const Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

Index lowest_argmin(const Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

}  // namespace

FunctionClass thresholds_class(Alphabet alphabet) {
  if (alphabet.size < 1) {
    throw std::invalid_argument("alphabet size must be positive");
  }
  FunctionClass cls;
  cls.kind = FunctionClass::Kind::Thresholds;
  cls.alphabet = alphabet;
  cls.members = Matrix::Zero(alphabet.size + 1, alphabet.size);
  for (int t = 0; t <= alphabet.size; ++t) {
    for (int s = t; s < alphabet.size; ++s) cls.members(t, s) = 1.0;
    cls.labels.push_back("s>=" + std::to_string(t));
  }
  return cls;
}

FunctionClass intervals_class(Alphabet alphabet) {
  if (alphabet.size < 1) {
    throw std::invalid_argument("alphabet size must be positive");
  }
  FunctionClass cls;
  cls.kind = FunctionClass::Kind::Intervals;
  cls.alphabet = alphabet;
  const Index count = 1 + static_cast<Index>(alphabet.size) *
                              (alphabet.size + 1) / 2;
  cls.members = Matrix::Zero(count, alphabet.size);
  cls.labels.push_back("empty");
  Index row = 1;
  for (int a = 0; a < alphabet.size; ++a) {
    for (int b = a; b < alphabet.size; ++b) {
      for (int s = a; s <= b; ++s) cls.members(row, s) = 1.0;
      cls.labels.push_back("[" + std::to_string(a) + "," + std::to_string(b) +
                           "]");
      ++row;
    }
  }
  return cls;
}

FunctionClass explicit_class(Alphabet alphabet, const Matrix& members,
                             std::vector<std::string> labels) {
  if (alphabet.size < 1) {
    throw std::invalid_argument("alphabet size must be positive");
  }
  if (members.rows() < 1 || members.cols() != alphabet.size) {
    throw std::invalid_argument("member table shape mismatches alphabet");
  }
  if ((members.array() < 0.0).any() || (members.array() > 1.0).any()) {
    throw std::invalid_argument("member values must lie in [0,1]");
  }
  if (!labels.empty() &&
      static_cast<Index>(labels.size()) != members.rows()) {
    throw std::invalid_argument("label count mismatches member count");
  }
  FunctionClass cls;
  cls.kind = FunctionClass::Kind::Explicit;
  cls.alphabet = alphabet;
  cls.members = members;
  if (labels.empty()) {
    for (Index i = 0; i < members.rows(); ++i) {
      cls.labels.push_back("member_" + std::to_string(i));
    }
  } else {
    cls.labels = std::move(labels);
  }
  return cls;
}

Vector marginal_distribution(const ProcessLaw& law) {
  return stationary_distribution(law);
}

Vector mixture_marginal(const MixtureLaw& mix) {
  Vector m = Vector::Zero(mix.alphabet.size);
  for (std::size_t i = 0; i < mix.components.size(); ++i) {
    m += mix.weights[static_cast<Index>(i)] *
         marginal_distribution(mix.components[i]);
  }
  return m;
}

RiskReport gap_report(const SamplePath& path, const FunctionClass& cls,
                      const Vector& target_dist) {
  check_class(cls);
  if (!is_probability_vector(target_dist) ||
      target_dist.size() != cls.alphabet.size) {
    throw std::invalid_argument(
        "target must be a probability vector over the class alphabet");
  }
  RiskReport report;
  report.empirical_means =
      cls.members * empirical_distribution(path, cls.alphabet);
  report.targets = cls.members * target_dist;
  const Vector gaps = (report.empirical_means - report.targets).cwiseAbs();
  report.argmax_index = lowest_argmax(gaps);
  report.sup_gap = gaps[report.argmax_index];
  return report;
}

RiskReport gap_report(const SamplePath& path, const FunctionClass& cls,
                      const ProcessLaw& target_law) {
  if (!(target_law.alphabet == cls.alphabet)) {
    throw std::invalid_argument("target law alphabet mismatches the class");
  }
  return gap_report(path, cls, marginal_distribution(target_law));
}

ErmResult erm(const SamplePath& path, const FunctionClass& cls) {
  check_class(cls);
  const Vector risks = cls.members * empirical_distribution(path, cls.alphabet);
  ErmResult result;
  result.index = lowest_argmin(risks);
  result.empirical_risk = risks[result.index];
  return result;
}

double erm_risk_gap(const RiskReport& report, Index f_hat) {
  if (f_hat < 0 || f_hat >= report.targets.size()) {
    throw std::invalid_argument("selected member outside the class");
  }
  return report.targets[f_hat] - report.targets.minCoeff();
}

std::string SampleComplexityEstimate::to_csv() const {
  std::string out = "n,failure_rate,stderr\n";
  for (const FailureRow& row : curve) {
    out += std::to_string(row.n);
    out += ',';
    out += detail::fmt_double(row.failure_rate);
    out += ',';
    out += detail::fmt_double(row.se);
    out += '\n';
  }
  return out;
}

SampleComplexityEstimate sample_complexity(
    const MixtureLaw& mix, const FunctionClass& cls, double epsilon,
    double delta, const std::vector<Index>& n_grid, Index trials,
    std::uint64_t seed, TargetKind target, int workers) {
  check_class(cls);
  if (!(cls.alphabet == mix.alphabet)) {
    throw std::invalid_argument("class alphabet mismatches the mixture");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("epsilon and delta must lie in (0,1)");
  }
  if (n_grid.empty()) throw std::invalid_argument("n grid must be nonempty");
  Index prev = 0;
  for (Index n : n_grid) {
    if (n <= prev) {
      throw std::invalid_argument("n grid must be strictly increasing");
    }
    prev = n;
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  // Per-member target expectations, one row per component (or the shared
  // mixture-marginal row for the contrast target).
  const Index comp_count = static_cast<Index>(mix.components.size());
  std::vector<Vector> member_targets(static_cast<std::size_t>(comp_count));
  for (Index i = 0; i < comp_count; ++i) {
    const Vector dist = target == TargetKind::Component
                            ? marginal_distribution(
                                  mix.components[static_cast<std::size_t>(i)])
                            : mixture_marginal(mix);
    member_targets[static_cast<std::size_t>(i)] = cls.members * dist;
  }

  SampleComplexityEstimate result;
  result.epsilon = epsilon;
  result.delta = delta;
  result.trials = trials;
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const Index n = n_grid[gi];
    std::vector<char> failed(static_cast<std::size_t>(trials));
    parallel_for(trials, workers, [&](Index t) {
      const SamplePath path = sample_mixture(
          mix, n, derive_seed(seed, streams::kTrial,
                              static_cast<std::uint64_t>(t)));
      const Vector emp = cls.members * empirical_distribution(path,
                                                              cls.alphabet);
      const Vector& tgt =
          member_targets[static_cast<std::size_t>(*path.component_index)];
      const double gap = (emp - tgt).cwiseAbs().maxCoeff();
      failed[static_cast<std::size_t>(t)] = gap >= epsilon ? 1 : 0;
    });
    Index failures = 0;
    for (const char f : failed) failures += f;
    FailureRow row;
    row.n = n;
    row.failure_rate = static_cast<double>(failures) /
                       static_cast<double>(trials);
    row.se = std::sqrt(row.failure_rate * (1.0 - row.failure_rate) /
                       static_cast<double>(trials));
    result.curve.push_back(row);
    if (!result.n_star && row.failure_rate <= delta) result.n_star = n;
  }
  return result;
}

std::vector<Index> default_n_grid() {
  std::vector<Index> grid;
  for (Index n = 32; n <= 16384; n *= 2) grid.push_back(n);
  return grid;
}

}  // namespace mixlearn
