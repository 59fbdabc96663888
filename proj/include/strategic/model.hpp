#pragma once

#include "strategic/common.hpp"
#include "strategic/scenario.hpp"

namespace strategic {

/// A published linear decision rule. Hidden coordinates are zero.
struct DecisionRule {
  Vector weights;

  static DecisionRule zero(Index dim) { return {Vector::Zero(dim)}; }
  Index size() const { return weights.size(); }
};

/// An agent's effort vector in action space.
struct ActionVector {
  Vector effort;
};

/// Exact objective values computed from ground truth. Test-side only.
struct ObjectiveReport {
  double agent_outcome = 0.0;
  double prediction_risk = 0.0;
  double param_error = 0.0;
};

/// Throws InvalidInput unless `rule` has the scenario's dimension, finite
/// entries and no weight on hidden coordinates.
void check_rule(const DecisionRule& rule, const Vector& visible_mask);

/// argmax_a ωᵀV(x + Ma) − ½‖a‖² = MᵀVω, the same for every agent.
ActionVector best_response(const DecisionRule& rule, const ScenarioSpec& scenario);

/// Gω: the feature shift of a gaming agent.
Vector feature_shift(const DecisionRule& rule, const ScenarioSpec& scenario);

/// E[(x+Gω)(x+Gω)ᵀ] = Σ + μ(Gω)ᵀ + (Gω)μᵀ + (Gω)(Gω)ᵀ.
Matrix gamed_second_moment_shift(const DecisionRule& rule, const ScenarioSpec& scenario);

/// ω*ᵀμ + p·ω*ᵀGω.
double agent_outcome_exact(const DecisionRule& rule, const ScenarioSpec& scenario);

/// Expected squared prediction error with a p-fraction of gamers; σ² is
/// charged to every agent.
double risk_exact(const DecisionRule& rule, const ScenarioSpec& scenario);

/// ‖V(ω − ω*)‖₂.
double param_error(const DecisionRule& rule, const ScenarioSpec& scenario);

ObjectiveReport evaluate_objectives(const DecisionRule& rule, const ScenarioSpec& scenario);

}  // namespace strategic
