#pragma once

#include <Eigen/Dense>

namespace mixlearn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

// Mass-balance tolerance for probability vectors and row-stochastic matrices.
inline constexpr double kProbTol = 1e-12;

// Half the L1 distance between two probability vectors.
inline double total_variation(const Vector& a, const Vector& b) {
  return 0.5 * (a - b).lpNorm<1>();
}

inline bool is_probability_vector(const Vector& v, double tol = kProbTol) {
  if (v.size() == 0) return false;
  if ((v.array() < 0.0).any()) return false;
  return std::abs(v.sum() - 1.0) <= tol;
}

}  // namespace mixlearn
