#include "strategic/scenario.hpp"

#include <cmath>

namespace strategic {
namespace {

constexpr double kMomentTol = 1e-9;

double min_eig(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ScenarioError(field, "scenario invariant violated: " + what);
}

double psd_tolerance(const Matrix& s) { return kMomentTol * std::max(1.0, s.cwiseAbs().maxCoeff()); }

}  // namespace

std::string to_string(DistKind kind) {
  switch (kind) {
    case DistKind::kGaussian: return "gaussian";
    case DistKind::kPointMass: return "point_mass";
    case DistKind::kFiniteMixture: return "finite_mixture";
  }
  return "unknown";
}

DistKind dist_kind_from_string(const std::string& name) {
  if (name == "gaussian") return DistKind::kGaussian;
  if (name == "point_mass") return DistKind::kPointMass;
  if (name == "finite_mixture") return DistKind::kFiniteMixture;
  throw InvalidInput("unknown distribution kind '" + name + "'");
}

Index ScenarioSpec::dim_visible() const {
  Index count = 0;
  for (Index i = 0; i < visible_mask.size(); ++i) count += visible_mask(i) == 1.0 ? 1 : 0;
  return count;
}

Matrix ScenarioSpec::visibility() const { return visible_mask.asDiagonal(); }

Matrix ScenarioSpec::gaming_matrix() const {
  return effort_matrix * effort_matrix.transpose() * visible_mask.asDiagonal();
}

Matrix ScenarioSpec::covariance() const { return second_moment - mean * mean.transpose(); }

void derive_moments(ScenarioSpec& s) {
  if (s.dist_kind == DistKind::kPointMass) {
    s.second_moment = s.mean * s.mean.transpose();
  } else if (s.dist_kind == DistKind::kFiniteMixture) {
    require(!s.atoms.empty(), "distribution", "finite_mixture needs at least one atom");
    const Index d = s.atoms.front().point.size();
    s.mean = Vector::Zero(d);
    s.second_moment = Matrix::Zero(d, d);
    double total = 0.0;
    for (const auto& atom : s.atoms) total += atom.weight;
    require(total > 0.0, "distribution", "finite_mixture weights must have a positive sum");
    for (const auto& atom : s.atoms) {
      require(atom.point.size() == d, "distribution", "finite_mixture atoms must share one dimension");
      const double w = atom.weight / total;
      s.mean += w * atom.point;
      s.second_moment += w * atom.point * atom.point.transpose();
    }
  }
}

void validate(const ScenarioSpec& s) {
  const Index d = s.dim_total;
  require(d >= 1, "dim_total", "dim_total must be positive");
  require(s.visible_mask.size() == d, "visible_mask", "visible_mask has length dim_total");
  require(s.mean.size() == d, "mean", "mean has length dim_total");
  require(s.second_moment.rows() == d && s.second_moment.cols() == d, "second_moment",
          "second_moment is dim_total x dim_total");
  require(s.effort_matrix.rows() == d, "effort_matrix", "effort_matrix has dim_total rows");
  require(s.effort_matrix.cols() >= 1, "effort_matrix", "effort_matrix has at least one column");
  require(s.true_params.size() == d, "true_params", "true_params has length dim_total");
  require(s.mean.allFinite(), "mean", "mean entries are finite");
  require(s.second_moment.allFinite(), "second_moment", "second_moment entries are finite");
  require(s.effort_matrix.allFinite(), "effort_matrix", "effort_matrix entries are finite");
  require(s.true_params.allFinite(), "true_params", "true_params entries are finite");

  for (Index i = 0; i < d; ++i) {
    require(s.visible_mask(i) == 0.0 || s.visible_mask(i) == 1.0, "visible_mask",
            "visible_mask entries are 0 or 1");
  }
  require(s.dim_visible() >= 1, "visible_mask", "at least one feature is visible");

  const double tol = psd_tolerance(s.second_moment);
  const double asym = (s.second_moment - s.second_moment.transpose()).cwiseAbs().maxCoeff();
  require(asym <= tol, "second_moment", "second_moment is symmetric");
  require(min_eig(s.second_moment) >= -tol, "second_moment", "second_moment is positive semidefinite");
  if (s.dist_kind == DistKind::kGaussian) {
    require(min_eig(s.covariance()) >= -tol, "second_moment",
            "second_moment - mean*mean^T is positive semidefinite (gaussian covariance)");
  }
  if (s.dist_kind == DistKind::kPointMass) {
    require(s.covariance().cwiseAbs().maxCoeff() <= tol, "second_moment",
            "point_mass second_moment equals mean*mean^T");
  }
  if (s.dist_kind == DistKind::kFiniteMixture) {
    for (const auto& atom : s.atoms) {
      require(atom.weight >= 0.0 && std::isfinite(atom.weight), "distribution",
              "finite_mixture weights are nonnegative");
      require(atom.point.size() == d, "distribution", "finite_mixture atoms have length dim_total");
    }
    ScenarioSpec derived = s;
    derive_moments(derived);
    require((derived.mean - s.mean).cwiseAbs().maxCoeff() <= kMomentTol &&
                (derived.second_moment - s.second_moment).cwiseAbs().maxCoeff() <= tol,
            "distribution", "finite_mixture mean/second_moment match the atoms");
  }

  require(std::isfinite(s.noise_sigma) && s.noise_sigma >= 0.0, "noise_sigma", "noise_sigma is nonnegative");
  require(s.gaming_fraction >= 0.0 && s.gaming_fraction <= 1.0, "gaming_fraction",
          "gaming_fraction lies in [0, 1]");

  if (s.homogeneous_coord) {
    const Index h = *s.homogeneous_coord;
    require(h >= 0 && h < d, "homogeneous_coord", "homogeneous_coord is a valid index");
    require(s.visible_mask(h) == 1.0, "homogeneous_coord", "homogeneous coordinate is visible");
    require(s.effort_matrix.row(h).cwiseAbs().maxCoeff() == 0.0, "homogeneous_coord",
            "effort_matrix row of the homogeneous coordinate is zero");
    require(std::abs(s.mean(h) - 1.0) <= kMomentTol, "homogeneous_coord", "mean at the homogeneous coordinate is 1");
    require((s.second_moment.col(h) - s.mean).cwiseAbs().maxCoeff() <= tol, "homogeneous_coord",
            "second_moment row/column at the homogeneous coordinate equals mean");
  }
}

}  // namespace strategic
