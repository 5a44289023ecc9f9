#include "mixlearn/process.hpp"

#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "json_util.hpp"
#include "mixlearn/rng.hpp"

namespace mixlearn {

namespace {

void check_alphabet(Alphabet alphabet) {
  if (alphabet.size < 1) {
    throw std::invalid_argument("alphabet size must be positive");
  }
}

void check_prob_vector(const Vector& v, Index size, const char* what) {
  if (v.size() != size) {
    throw std::invalid_argument(std::string(what) +
                                " has wrong length for the alphabet");
  }
  if (!is_probability_vector(v)) {
    throw std::invalid_argument(std::string(what) +
                                " must be a probability vector");
  }
}

// BFS levels over the edges P(i,j) > 0, or empty if some state is
// unreachable from `root`.
std::vector<int> bfs_levels(const Matrix& p, Index root, bool reverse) {
  const Index n = p.rows();
  std::vector<int> level(n, -1);
  std::vector<Index> queue{root};
  level[root] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Index u = queue[head];
    for (Index v = 0; v < n; ++v) {
      const double w = reverse ? p(v, u) : p(u, v);
      if (w > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  if (static_cast<Index>(queue.size()) != n) level.clear();
  return level;
}

bool is_ergodic_chain(const Matrix& p) {
  const std::vector<int> fwd = bfs_levels(p, 0, false);
  if (fwd.empty() || bfs_levels(p, 0, true).empty()) return false;
  // Period of a strongly connected graph: gcd of level[u] + 1 - level[v]
  // over edges u -> v. Aperiodic iff the gcd is 1.
  const Index n = p.rows();
  int g = 0;
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      if (p(u, v) > 0.0) g = std::gcd(g, std::abs(fwd[u] + 1 - fwd[v]));
    }
  }
  return g == 1;
}

Vector solve_stationary(const Matrix& p) {
  const Index n = p.rows();
  // Stacked system [P^T - I; 1^T] x = [0; 1]; unique least-squares solution
  // for an ergodic chain.
  Matrix a(n + 1, n);
  a.topRows(n) = p.transpose() - Matrix::Identity(n, n);
  a.row(n).setOnes();
  Vector b = Vector::Zero(n + 1);
  b[n] = 1.0;
  Vector pi = a.colPivHouseholderQr().solve(b);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return pi;
}

}  // namespace

ProcessLaw iid_law(Alphabet alphabet, Vector dist) {
  check_alphabet(alphabet);
  check_prob_vector(dist, alphabet.size, "iid dist");
  ProcessLaw law;
  law.kind = LawKind::Iid;
  law.alphabet = alphabet;
  law.dist = std::move(dist);
  return law;
}

ProcessLaw markov_law(Alphabet alphabet, Matrix transition,
                      std::optional<Vector> initial) {
  check_alphabet(alphabet);
  const Index n = alphabet.size;
  if (transition.rows() != n || transition.cols() != n) {
    throw std::invalid_argument("transition matrix shape must match alphabet");
  }
  for (Index r = 0; r < n; ++r) {
    check_prob_vector(transition.row(r).transpose(), n, "transition row");
  }
  if (!is_ergodic_chain(transition)) {
    throw std::invalid_argument("no unique stationary distribution");
  }
  ProcessLaw law;
  law.kind = LawKind::Markov;
  law.alphabet = alphabet;
  law.transition = std::move(transition);
  law.initial = solve_stationary(law.transition);
  if (initial) {
    check_prob_vector(*initial, n, "initial distribution");
    if ((*initial - law.initial).cwiseAbs().maxCoeff() > 1e-9) {
      throw std::invalid_argument("initial distribution must be stationary");
    }
  }
  return law;
}

ProcessLaw delta_law(Alphabet alphabet, int symbol) {
  check_alphabet(alphabet);
  if (symbol < 0 || symbol >= alphabet.size) {
    throw std::invalid_argument("delta symbol outside the alphabet");
  }
  ProcessLaw law;
  law.kind = LawKind::Delta;
  law.alphabet = alphabet;
  law.symbol = symbol;
  return law;
}

MixtureLaw mixture_law(std::vector<ProcessLaw> components, Vector weights) {
  if (components.empty()) {
    throw std::invalid_argument("mixture needs at least one component");
  }
  const Alphabet alphabet = components.front().alphabet;
  for (const auto& c : components) {
    if (!(c.alphabet == alphabet)) {
      throw std::invalid_argument("mixture components must share one alphabet");
    }
  }
  check_prob_vector(weights, static_cast<Index>(components.size()),
                    "mixture weights");
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      if (laws_equal(components[i], components[j])) {
        throw std::invalid_argument("mixture components must be distinct");
      }
    }
  }
  MixtureLaw mix;
  mix.alphabet = alphabet;
  mix.components = std::move(components);
  mix.weights = std::move(weights);
  return mix;
}

bool laws_equal(const ProcessLaw& a, const ProcessLaw& b, double tol) {
  if (a.kind != b.kind || !(a.alphabet == b.alphabet)) return false;
  switch (a.kind) {
    case LawKind::Iid:
      return (a.dist - b.dist).cwiseAbs().maxCoeff() <= tol;
    case LawKind::Markov:
      return (a.transition - b.transition).cwiseAbs().maxCoeff() <= tol;
    case LawKind::Delta:
      return a.symbol == b.symbol;
  }
  return false;
}

Vector stationary_distribution(const ProcessLaw& law) {
  switch (law.kind) {
    case LawKind::Iid:
      return law.dist;
    case LawKind::Markov:
      return law.initial;
    case LawKind::Delta: {
      Vector pi = Vector::Zero(law.alphabet.size);
      pi[law.symbol] = 1.0;
      return pi;
    }
  }
  throw std::logic_error("unreachable law kind");
}

SamplePath sample_component(const ProcessLaw& law, Index n,
                            std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("path length must be positive");
  SamplePath path;
  path.symbols.resize(n);
  path.seed = seed;
  switch (law.kind) {
    case LawKind::Delta:
      path.symbols.setConstant(law.symbol);
      break;
    case LawKind::Iid: {
      Rng rng(seed);
      const Vector cum = cumulative(law.dist);
      for (Index t = 0; t < n; ++t) path.symbols[t] = rng.categorical(cum);
      break;
    }
    case LawKind::Markov: {
      Rng rng(seed);
      const Index a = law.alphabet.size;
      Matrix row_cum(a, a);
      for (Index r = 0; r < a; ++r) {
        row_cum.row(r) = cumulative(law.transition.row(r).transpose());
      }
      int state = rng.categorical(cumulative(law.initial));
      path.symbols[0] = state;
      for (Index t = 1; t < n; ++t) {
        state = rng.categorical(row_cum.row(state).transpose());
        path.symbols[t] = state;
      }
      break;
    }
  }
  return path;
}

SamplePath sample_mixture(const MixtureLaw& mix, Index n, std::uint64_t seed) {
  Rng pick(derive_seed(seed, streams::kComponent, 0));
  const int j = pick.categorical(cumulative(mix.weights));
  SamplePath path = sample_component(mix.components[j], n,
                                     derive_seed(seed, streams::kPath, 0));
  path.component_index = j;
  path.seed = seed;
  return path;
}

double expectation(const ProcessLaw& law, const Vector& f) {
  if (f.size() != law.alphabet.size) {
    throw std::invalid_argument("function table length must match alphabet");
  }
  if ((f.array() < 0.0).any() || (f.array() > 1.0).any()) {
    throw std::invalid_argument("function values must lie in [0,1]");
  }
  return stationary_distribution(law).dot(f);
}

MarkovKernel as_kernel(const ProcessLaw& law) {
  MarkovKernel k;
  k.initial = stationary_distribution(law);
  const Index a = law.alphabet.size;
  switch (law.kind) {
    case LawKind::Markov:
      k.transition = law.transition;
      break;
    case LawKind::Iid:
    case LawKind::Delta:
      k.transition.resize(a, a);
      for (Index r = 0; r < a; ++r) k.transition.row(r) = k.initial.transpose();
      break;
  }
  return k;
}

Matrix kernel_power(const ProcessLaw& law, int k) {
  if (k < 1) throw std::invalid_argument("kernel power requires k >= 1");
  const MarkovKernel kernel = as_kernel(law);
  if (law.kind != LawKind::Markov) return kernel.transition;
  Matrix p = kernel.transition;
  for (int i = 1; i < k; ++i) p = p * kernel.transition;
  return p;
}

nlohmann::json law_to_json(const ProcessLaw& law) {
  nlohmann::json j;
  j["alphabet"] = law.alphabet.size;
  switch (law.kind) {
    case LawKind::Iid:
      j["kind"] = "iid";
      j["dist"] = detail::vector_to_json(law.dist);
      break;
    case LawKind::Markov:
      j["kind"] = "markov";
      j["transition"] = detail::matrix_to_json(law.transition);
      j["initial"] = detail::vector_to_json(law.initial);
      break;
    case LawKind::Delta:
      j["kind"] = "delta";
      j["symbol"] = law.symbol;
      break;
  }
  return j;
}

ProcessLaw law_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"alphabet", "kind", "dist", "transition", "initial",
                           "symbol"},
                       "law json");
  const Alphabet alphabet{j.at("alphabet").get<int>()};
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "iid") {
    return iid_law(alphabet, detail::vector_from_json(j.at("dist"), "dist"));
  }
  if (kind == "markov") {
    std::optional<Vector> initial;
    if (j.contains("initial")) {
      initial = detail::vector_from_json(j.at("initial"), "initial");
    }
    return markov_law(
        alphabet, detail::matrix_from_json(j.at("transition"), "transition"),
        initial);
  }
  if (kind == "delta") {
    return delta_law(alphabet, j.at("symbol").get<int>());
  }
  throw std::invalid_argument("unknown law kind \"" + kind + "\"");
}

nlohmann::json mixture_to_json(const MixtureLaw& mix) {
  nlohmann::json j;
  j["alphabet"] = mix.alphabet.size;
  j["weights"] = detail::vector_to_json(mix.weights);
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : mix.components) comps.push_back(law_to_json(c));
  j["components"] = comps;
  return j;
}

MixtureLaw mixture_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"alphabet", "weights", "components"},
                       "mixture json");
  const int alphabet = j.at("alphabet").get<int>();
  std::vector<ProcessLaw> components;
  for (const auto& c : j.at("components")) {
    components.push_back(law_from_json(c));
    if (components.back().alphabet.size != alphabet) {
      throw std::invalid_argument(
          "mixture components must share one alphabet");
    }
  }
  return mixture_law(std::move(components),
                     detail::vector_from_json(j.at("weights"), "weights"));
}

nlohmann::json path_to_json(const SamplePath& path) {
  nlohmann::json j;
  nlohmann::json symbols = nlohmann::json::array();
  for (Index t = 0; t < path.symbols.size(); ++t) {
    symbols.push_back(path.symbols[t]);
  }
  j["symbols"] = symbols;
  if (path.component_index) {
    j["component_index"] = *path.component_index;
  } else {
    j["component_index"] = nullptr;
  }
  j["seed"] = path.seed;
  return j;
}

SamplePath path_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"symbols", "component_index", "seed"}, "path json");
  SamplePath path;
  const auto& symbols = j.at("symbols");
  path.symbols.resize(static_cast<Index>(symbols.size()));
  Index t = 0;
  for (const auto& s : symbols) path.symbols[t++] = s.get<int>();
  if (j.contains("component_index") && !j.at("component_index").is_null()) {
    path.component_index = j.at("component_index").get<int>();
  }
  if (j.contains("seed")) path.seed = j.at("seed").get<std::uint64_t>();
  return path;
}

}  // namespace mixlearn
