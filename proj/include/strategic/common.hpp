#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace strategic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Bad arguments, malformed scenario files, violated preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The caller asked for something the algorithm does not cover (e.g. hidden
/// features in parameter recovery).
class UnsupportedScope : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative procedures that failed to produce a finite answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace strategic
