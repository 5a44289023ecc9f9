#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixlearn/process.hpp"
#include "mixlearn/types.hpp"

namespace mixlearn {

// Finite enumerated class of [0,1]-valued functions on the alphabet, stored
// row-major: members(i, s) is the value of member i at symbol s. Finiteness
// makes every supremum below an exact maximum.
struct FunctionClass {
  enum class Kind { Thresholds, Intervals, Explicit };
  Kind kind = Kind::Explicit;
  Alphabet alphabet;
  Matrix members;
  std::vector<std::string> labels;

  Index size() const { return members.rows(); }
};

// Indicators 1{s >= t} for t = 0..alphabet.size, in that order. The last
// member is identically zero.
FunctionClass thresholds_class(Alphabet alphabet);

// Empty set first, then indicators of [a,b] in lexicographic (a,b) order.
FunctionClass intervals_class(Alphabet alphabet);

// Arbitrary finite table; rows are members, entries must lie in [0,1].
FunctionClass explicit_class(Alphabet alphabet, const Matrix& members,
                             std::vector<std::string> labels = {});

// Marginal symbol distribution of a law: stationary distribution for Markov,
// dist for IID, point mass for Delta.
Vector marginal_distribution(const ProcessLaw& law);

// Weight-averaged component marginals.
Vector mixture_marginal(const MixtureLaw& mix);

// Worst-case gap over the class between path averages and target
// expectations, with the per-member values retained.
struct RiskReport {
  double sup_gap = 0.0;
  Index argmax_index = 0;
  Vector empirical_means;
  Vector targets;
};

// Exact maximum over the class of |path average of f - E f| where the
// expectation is taken under `target_dist` (a distribution on the alphabet).
// Ties in the maximum resolve to the lowest member index.
RiskReport gap_report(const SamplePath& path, const FunctionClass& cls,
                      const Vector& target_dist);

// Same with the target read off a law's marginal distribution. The law is
// the component that generated the path when the predictive target is meant.
RiskReport gap_report(const SamplePath& path, const FunctionClass& cls,
                      const ProcessLaw& target_law);

struct ErmResult {
  Index index = 0;
  double empirical_risk = 0.0;
};

// Member with minimal path average (members are loss tables directly); ties
// broken by lowest enumeration index.
ErmResult erm(const SamplePath& path, const FunctionClass& cls);

// Excess true risk of the selected member: targets[f_hat] - min targets.
// Bounded by 2 * report.sup_gap for every path, deterministically.
double erm_risk_gap(const RiskReport& report, Index f_hat);

// Which expectation a trial is scored against: the generating component's
// marginal, or the mixture-wide marginal. The component target is the one
// the learnability results are about; the marginal target is the contrast
// that fails on non-trivial mixtures.
enum class TargetKind { Component, MixtureMarginal };

struct FailureRow {
  Index n = 0;
  double failure_rate = 0.0;
  double se = 0.0;
};

struct SampleComplexityEstimate {
  double epsilon = 0.0;
  double delta = 0.0;
  Index trials = 0;
  std::vector<FailureRow> curve;
  std::optional<Index> n_star;

  // CSV columns: n,failure_rate,stderr.
  std::string to_csv() const;
};

// Monte Carlo failure curve n -> P(gap >= epsilon) over the grid, and the
// smallest grid point with estimated failure <= delta (absent is a valid
// outcome). Trial t draws its component and path from seeds derived off
// (seed, t) only, so runs over the same grid with the same master seed reuse
// identical paths; a length-n path is a prefix of the length-n' path, n < n'.
SampleComplexityEstimate sample_complexity(
    const MixtureLaw& mix, const FunctionClass& cls, double epsilon,
    double delta, const std::vector<Index>& n_grid, Index trials,
    std::uint64_t seed, TargetKind target = TargetKind::Component,
    int workers = 1);

// Default geometric grid 2^5 .. 2^14.
std::vector<Index> default_n_grid();

}  // namespace mixlearn
