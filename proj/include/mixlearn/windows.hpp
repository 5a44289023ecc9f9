#pragma once

#include "mixlearn/process.hpp"
#include "mixlearn/types.hpp"

namespace mixlearn {

// Finite observation windows are encoded as base-A integers, first symbol in
// the highest digit. All enumeration-based code (brute-force beta, ensemble
// histograms, conditional window laws) shares this encoding.

// alphabet^len, guarded; throws "state space too large" above `guard`.
Index window_count(int alphabet_size, int len, Index guard = 10'000'000);

// Encode symbols[offset .. offset+len) of a path.
Index encode_window(const IntVector& symbols, Index offset, int len,
                    int alphabet_size);

// Law of a length-`len` window (X_1..X_len) when X_1 ~ start and the chain
// then moves by `transition`. Entry v of the result is the probability of
// the window decoding to v.
Vector window_law(const Vector& start, const Matrix& transition, int len,
                  int alphabet_size);

}  // namespace mixlearn
