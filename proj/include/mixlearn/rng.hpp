#pragma once

#include <cstdint>
#include <random>

#include "mixlearn/types.hpp"

namespace mixlearn {

// Counter-based seed derivation: every sampling call takes an explicit seed,
// and trial i of an experiment derives its seed from (master, stream, i).
// Results are therefore independent of execution order and worker count.
//
// The derivation is two rounds of the splitmix64 finalizer over the mixed-in
// stream and index words; it is stable across platforms and releases.
namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  std::uint64_t h = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  h = detail::mix64(h);
  h += 0x9E3779B97F4A7C15ull * (index + 1);
  return detail::mix64(h);
}

namespace streams {
inline constexpr std::uint64_t kComponent = 1;  // mixture component draw
inline constexpr std::uint64_t kPath = 2;       // path symbols
inline constexpr std::uint64_t kTrial = 3;      // per-trial seeds
inline constexpr std::uint64_t kBootstrap = 4;  // bootstrap resamples
inline constexpr std::uint64_t kGrid = 5;       // per-grid-point seeds
}  // namespace streams

// Deterministic draws on top of mt19937_64. Doubles come from the top 53
// bits and categorical draws from a cumulative scan, so identical seeds give
// identical output on every platform (std::*_distribution is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double u01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // cumulative must be non-decreasing with back() == 1.
  int categorical(const Vector& cumulative) {
    const double u = u01();
    const Index n = cumulative.size();
    for (Index i = 0; i < n; ++i) {
      if (u < cumulative[i]) return static_cast<int>(i);
    }
    return static_cast<int>(n - 1);
  }

  Index uniform_index(Index n) {
    return static_cast<Index>(u01() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

// Cumulative sums with the last entry forced to exactly 1.
inline Vector cumulative(const Vector& probs) {
  Vector c(probs.size());
  double acc = 0.0;
  for (Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    c[i] = acc;
  }
  if (c.size() > 0) c[c.size() - 1] = 1.0;
  return c;
}

}  // namespace mixlearn
