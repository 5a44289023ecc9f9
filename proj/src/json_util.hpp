#pragma once

#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <string>

#include "mixlearn/types.hpp"

namespace mixlearn::detail {

// Configs and law documents are validated strictly: an unknown key is a
// config error, not something to ignore silently.
inline void require_keys(const nlohmann::json& j,
                         const std::set<std::string>& allowed,
                         const char* what) {
  if (!j.is_object()) {
    throw std::invalid_argument(std::string(what) + " must be a json object");
  }
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw std::invalid_argument(std::string("unknown key \"") + item.key() +
                                  "\" in " + what);
    }
  }
}

inline Vector vector_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) {
    throw std::invalid_argument(std::string(what) + " must be an array");
  }
  Vector v(static_cast<Index>(j.size()));
  Index i = 0;
  for (const auto& x : j) {
    if (!x.is_number()) {
      throw std::invalid_argument(std::string(what) + " must be numeric");
    }
    v[i++] = x.get<double>();
  }
  return v;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument(std::string(what) +
                                " must be a nonempty array of rows");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  Index r = 0;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw std::invalid_argument(std::string(what) +
                                  " rows must have equal length");
    }
    Index c = 0;
    for (const auto& x : row) {
      if (!x.is_number()) {
        throw std::invalid_argument(std::string(what) + " must be numeric");
      }
      m(r, c++) = x.get<double>();
    }
    ++r;
  }
  return m;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mixlearn::detail
