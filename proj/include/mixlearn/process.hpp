#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mixlearn/types.hpp"

namespace mixlearn {

// Finite ordered alphabet {0, ..., size-1}.
struct Alphabet {
  int size = 0;
};

inline bool operator==(const Alphabet& a, const Alphabet& b) {
  return a.size == b.size;
}

enum class LawKind { Iid, Markov, Delta };

// Law of one ergodic component process over a finite alphabet.
//
// Unused parameter blocks stay empty: `dist` for IID, `transition`/`initial`
// for Markov, `symbol` for Delta. Markov laws are stationary by construction:
// `initial` is the stationary distribution (an explicit non-stationary
// initial is rejected). Delta(s) is the point mass on the constant sequence
// s,s,s,...
struct ProcessLaw {
  LawKind kind = LawKind::Iid;
  Alphabet alphabet;
  Vector dist;
  Matrix transition;
  Vector initial;
  int symbol = 0;
};

// Finite convex mixture of component laws over a shared alphabet.
struct MixtureLaw {
  Alphabet alphabet;
  std::vector<ProcessLaw> components;
  Vector weights;
};

// A finite realization, tagged with the generating component when drawn from
// a mixture and with the seed that produced it.
struct SamplePath {
  IntVector symbols;
  std::optional<int> component_index;
  std::uint64_t seed = 0;
};

// Factories validate and throw std::invalid_argument on bad parameters.
ProcessLaw iid_law(Alphabet alphabet, Vector dist);
ProcessLaw markov_law(Alphabet alphabet, Matrix transition,
                      std::optional<Vector> initial = std::nullopt);
ProcessLaw delta_law(Alphabet alphabet, int symbol);
MixtureLaw mixture_law(std::vector<ProcessLaw> components, Vector weights);

// Parameter-wise equality within tol, used for the mixture distinctness
// invariant.
bool laws_equal(const ProcessLaw& a, const ProcessLaw& b, double tol = 1e-12);

// Stationary law of the component: the IID dist, the Delta point mass, or
// the unique solution of pi P = pi for an irreducible aperiodic chain.
// Throws for reducible or periodic chains ("no unique stationary
// distribution").
Vector stationary_distribution(const ProcessLaw& law);

// Length-n stationary realization; deterministic given (law, n, seed).
SamplePath sample_component(const ProcessLaw& law, Index n, std::uint64_t seed);

// Hierarchical draw: component index from the mixture weights, then a path
// from that component; the index is recorded on the returned path.
SamplePath sample_mixture(const MixtureLaw& mix, Index n, std::uint64_t seed);

// Exact stationary expectation of f (a [0,1]-valued table on the alphabet).
double expectation(const ProcessLaw& law, const Vector& f);

// Every law viewed as a Markov kernel: IID rows all equal dist, Delta rows
// all the point mass. Lets dependence and conditioning code treat components
// uniformly.
struct MarkovKernel {
  Vector initial;  // stationary
  Matrix transition;
};
MarkovKernel as_kernel(const ProcessLaw& law);

// k-step transition matrix. For IID and Delta laws P^k == P holds exactly
// and no numeric power is taken.
Matrix kernel_power(const ProcessLaw& law, int k);

// JSON schema (documented in the README):
//   {"alphabet": k, "kind": "iid",    "dist": [...]}
//   {"alphabet": k, "kind": "markov", "transition": [[...]], "initial": [...]}
//   {"alphabet": k, "kind": "delta",  "symbol": s}
//   {"alphabet": k, "weights": [...], "components": [law, ...]}
nlohmann::json law_to_json(const ProcessLaw& law);
ProcessLaw law_from_json(const nlohmann::json& j);
nlohmann::json mixture_to_json(const MixtureLaw& mix);
MixtureLaw mixture_from_json(const nlohmann::json& j);
nlohmann::json path_to_json(const SamplePath& path);
SamplePath path_from_json(const nlohmann::json& j);

}  // namespace mixlearn
