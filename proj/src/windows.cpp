#include "mixlearn/windows.hpp"

#include <stdexcept>
#include <utility>

namespace mixlearn {

Index window_count(int alphabet_size, int len, Index guard) {
  if (alphabet_size < 1) {
    throw std::invalid_argument("alphabet size must be positive");
  }
  if (len < 0) throw std::invalid_argument("window length must be >= 0");
  Index count = 1;
  for (int i = 0; i < len; ++i) {
    if (count > guard / alphabet_size) {
      throw std::invalid_argument("state space too large");
    }
    count *= alphabet_size;
  }
  if (count > guard) throw std::invalid_argument("state space too large");
  return count;
}

Index encode_window(const IntVector& symbols, Index offset, int len,
                    int alphabet_size) {
  if (offset < 0 || offset + len > symbols.size()) {
    throw std::out_of_range("window outside the path");
  }
  Index code = 0;
  for (int i = 0; i < len; ++i) {
    code = code * alphabet_size + symbols[offset + i];
  }
  return code;
}

Vector window_law(const Vector& start, const Matrix& transition, int len,
                  int alphabet_size) {
  if (len < 1) throw std::invalid_argument("window length must be >= 1");
  if (start.size() != alphabet_size ||
      transition.rows() != alphabet_size ||
      transition.cols() != alphabet_size) {
    throw std::invalid_argument("window law shape mismatch");
  }
  window_count(alphabet_size, len);
  Vector cur = start;
  for (int l = 1; l < len; ++l) {
    Vector next(cur.size() * alphabet_size);
    for (Index code = 0; code < cur.size(); ++code) {
      const Index last = code % alphabet_size;
      for (int s = 0; s < alphabet_size; ++s) {
        next[code * alphabet_size + s] = cur[code] * transition(last, s);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace mixlearn
