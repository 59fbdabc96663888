#pragma once

#include "strategic/common.hpp"

#include <utility>

namespace strategic {

struct OlsFit {
  Vector coefficients;
  Index n_samples = 0;
  double kappa_min = 0.0;    // λ_min((1/n) XᵀX)
  double error_bound = 0.0;  // d/(n κ_min), +inf when rank deficient
  Index rank = 0;
};

Vector empirical_mean(const Matrix& samples);

/// (1/n) Σ xᵢxᵢᵀ.
Matrix empirical_second_moment(const Matrix& samples);

/// Least squares via complete orthogonal decomposition. Rank-deficient
/// designs get the minimum-norm solution and an infinite error bound.
OlsFit ols_fit(const Matrix& x, const Vector& y);

struct EigenPair {
  double value = 0.0;
  Vector vector;
};

/// Smallest eigenvalue of a symmetric matrix and a unit eigenvector.
/// Matrices asymmetric beyond 1e-9 (relative) are rejected.
EigenPair min_eigenvalue(const Matrix& s);

/// Largest eigenvalue of a symmetric matrix.
double max_eigenvalue(const Matrix& s);

}  // namespace strategic
