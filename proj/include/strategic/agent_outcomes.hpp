#pragma once

#include "strategic/environment.hpp"
#include "strategic/model.hpp"

#include <optional>
#include <vector>

namespace strategic {

struct Alg1Config {
  double lambda_max = 1.0;  // upper bound on λ_max(Σ)
  double epsilon = 0.1;
  /// n = ⌈sample_multiplier · λ_max · d / ε⌉ unless overridden.
  double sample_multiplier = 100.0;
  std::optional<Index> samples_per_round;
  /// Orthonormal vectors spanning the visible subspace; visible standard
  /// basis when empty.
  std::vector<Vector> basis;
  /// Draw the d+1 rounds concurrently. Results are identical either way.
  bool parallel = false;

  Index resolved_samples(Index dim_visible) const;
};

struct Alg1Result {
  DecisionRule omega_hat;  // unit norm, or zero when no direction helps
  Vector nu_hat;           // estimate of Gᵀω* (visible support)
  double mu_hat = 0.0;     // estimate of E[ω*ᵀx]
  bool no_improvement = false;
  Index rounds_used = 0;
  Index samples_per_round = 0;
  std::vector<double> round_means;  // mean outcome per round, round 0 = zero rule
  std::vector<double> nu_coords;    // ν̂ᵢ in the basis
  std::vector<DecisionRule> published;
};

/// Visible standard basis vectors of length mask.size().
std::vector<Vector> visible_standard_basis(const Vector& visible_mask);

/// Agent-outcome maximization: probe ω = 0, then each basis vector, and
/// point the published rule along the estimated Gᵀω*.
///
/// ω̂ = 0 and `no_improvement` are returned when ‖ν̂‖ ≤ ε/2; then
/// ‖Gᵀω*‖ ≤ ε on the good event, so the zero rule is already ε-optimal.
Alg1Result run_algorithm1(Environment& env, const Alg1Config& cfg);

/// Gᵀω*/‖Gᵀω*‖, or zero. Oracle.
DecisionRule omega_mao(const ScenarioSpec& scenario);

/// AO(ω_mao) − AO(ω̂); equals ‖Gᵀω*‖ − ω*ᵀGω̂ when p = 1. Oracle.
double agent_outcome_regret(const Alg1Result& result, const ScenarioSpec& scenario);

}  // namespace strategic
