#include "strategic/estimators.hpp"

#include <cmath>
#include <limits>

namespace strategic {
namespace {

constexpr double kSymmetryTol = 1e-9;

Matrix symmetrized(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0) throw InvalidInput("expected a non-empty square matrix");
  if (!s.allFinite()) throw InvalidInput("matrix has non-finite entries");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw InvalidInput("matrix is not symmetric");
  }
  return 0.5 * (s + s.transpose());
}

}  // namespace

Vector empirical_mean(const Matrix& samples) {
  if (samples.rows() == 0) throw InvalidInput("empirical_mean of an empty sample");
  return samples.colwise().mean().transpose();
}

Matrix empirical_second_moment(const Matrix& samples) {
  if (samples.rows() == 0) throw InvalidInput("empirical_second_moment of an empty sample");
  Matrix s = (samples.transpose() * samples) / static_cast<double>(samples.rows());
  return 0.5 * (s + s.transpose());
}

OlsFit ols_fit(const Matrix& x, const Vector& y) {
  if (x.rows() == 0) throw InvalidInput("ols_fit needs at least one sample");
  if (x.rows() != y.size()) throw InvalidInput("ols_fit: X and y disagree on the sample count");
  if (!x.allFinite() || !y.allFinite()) throw InvalidInput("ols_fit: non-finite inputs");

  OlsFit fit;
  fit.n_samples = x.rows();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
  fit.coefficients = cod.solve(y);
  fit.rank = cod.rank();

  const Matrix moment = empirical_second_moment(x);
  fit.kappa_min = std::max(0.0, min_eigenvalue(moment).value);
  const auto d = static_cast<double>(x.cols());
  if (fit.rank < x.cols() || fit.kappa_min <= 0.0) {
    fit.error_bound = std::numeric_limits<double>::infinity();
  } else {
    fit.error_bound = d / (static_cast<double>(fit.n_samples) * fit.kappa_min);
  }
  return fit;
}

EigenPair min_eigenvalue(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(s));
  if (solver.info() != Eigen::Success) throw NumericalError("eigen decomposition failed");
  return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

double max_eigenvalue(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(s), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

}  // namespace strategic
