#pragma once

#include "strategic/common.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace strategic {

enum class DistKind { kGaussian, kPointMass, kFiniteMixture };

std::string to_string(DistKind kind);
DistKind dist_kind_from_string(const std::string& name);

/// Validation failure attributed to one scenario field.
class ScenarioError : public InvalidInput {
 public:
  ScenarioError(std::string field, const std::string& message) : InvalidInput(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct MixtureAtom {
  double weight = 0.0;
  Vector point;
};

/// Ground truth of a simulated world. Only the simulator and test-side
/// oracles read this; algorithms see an Environment.
///
/// `second_moment` is E[xxᵀ] (not the covariance). For the gaussian kind the
/// covariance is second_moment − mean·meanᵀ.
struct ScenarioSpec {
  std::string name;
  Index dim_total = 0;
  Vector visible_mask;   // diagonal of V, entries 0/1
  Vector mean;           // μ
  Matrix second_moment;  // Σ
  DistKind dist_kind = DistKind::kGaussian;
  std::vector<MixtureAtom> atoms;  // finite_mixture only
  Matrix effort_matrix;            // M, d′ × k
  Vector true_params;              // ω*
  double noise_sigma = 0.0;        // standard deviation of η
  double gaming_fraction = 1.0;    // p
  std::optional<Index> homogeneous_coord;

  Index dim_visible() const;
  Index dim_action() const { return effort_matrix.cols(); }
  bool fully_visible() const { return dim_visible() == dim_total; }

  /// V as a dense diagonal matrix.
  Matrix visibility() const;
  /// G = M Mᵀ V.
  Matrix gaming_matrix() const;
  /// Σ − μμᵀ.
  Matrix covariance() const;
};

/// Throws InvalidInput naming the first violated invariant.
void validate(const ScenarioSpec& scenario);

/// Fills μ and Σ from the atoms (finite_mixture) or from μ (point_mass).
void derive_moments(ScenarioSpec& scenario);

}  // namespace strategic
