#include "strategic/model.hpp"

namespace strategic {

void check_rule(const DecisionRule& rule, const Vector& visible_mask) {
  if (rule.size() != visible_mask.size()) {
    throw InvalidInput("decision rule has length " + std::to_string(rule.size()) + ", expected " +
                       std::to_string(visible_mask.size()));
  }
  if (!rule.weights.allFinite()) throw InvalidInput("decision rule has non-finite entries");
  for (Index i = 0; i < rule.size(); ++i) {
    if (visible_mask(i) == 0.0 && rule.weights(i) != 0.0) {
      throw InvalidInput("decision rule puts weight on hidden coordinate " + std::to_string(i));
    }
  }
}

ActionVector best_response(const DecisionRule& rule, const ScenarioSpec& scenario) {
  check_rule(rule, scenario.visible_mask);
  return {scenario.effort_matrix.transpose() * scenario.visible_mask.cwiseProduct(rule.weights)};
}

Vector feature_shift(const DecisionRule& rule, const ScenarioSpec& scenario) {
  return scenario.effort_matrix * best_response(rule, scenario).effort;
}

Matrix gamed_second_moment_shift(const DecisionRule& rule, const ScenarioSpec& scenario) {
  const Vector s = feature_shift(rule, scenario);
  const Vector& mu = scenario.mean;
  return scenario.second_moment + mu * s.transpose() + s * mu.transpose() + s * s.transpose();
}

double agent_outcome_exact(const DecisionRule& rule, const ScenarioSpec& scenario) {
  const Vector s = feature_shift(rule, scenario);
  return scenario.true_params.dot(scenario.mean) + scenario.gaming_fraction * scenario.true_params.dot(s);
}

double risk_exact(const DecisionRule& rule, const ScenarioSpec& scenario) {
  const Vector s = feature_shift(rule, scenario);
  const Vector q = scenario.visible_mask.cwiseProduct(rule.weights) - scenario.true_params;
  const double p = scenario.gaming_fraction;
  const double static_part = q.dot(scenario.second_moment * q);
  const double qs = q.dot(s);
  const double gamed = static_part + 2.0 * q.dot(scenario.mean) * qs + qs * qs;
  return (1.0 - p) * static_part + p * gamed + scenario.noise_sigma * scenario.noise_sigma;
}

double param_error(const DecisionRule& rule, const ScenarioSpec& scenario) {
  return scenario.visible_mask.cwiseProduct(rule.weights - scenario.true_params).norm();
}

ObjectiveReport evaluate_objectives(const DecisionRule& rule, const ScenarioSpec& scenario) {
  return {agent_outcome_exact(rule, scenario), risk_exact(rule, scenario), param_error(rule, scenario)};
}

}  // namespace strategic
