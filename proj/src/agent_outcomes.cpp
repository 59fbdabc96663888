#include "strategic/agent_outcomes.hpp"

#include <cmath>

namespace strategic {
namespace {

constexpr double kOrthoTol = 1e-10;

void check_basis(const std::vector<Vector>& basis, const Vector& mask) {
  const auto d = static_cast<std::size_t>((mask.array() == 1.0).count());
  if (basis.size() != d) throw InvalidInput("basis must have one vector per visible feature");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != mask.size()) throw InvalidInput("basis vector has the wrong length");
    if ((basis[i].array() * (1.0 - mask.array())).abs().maxCoeff() > 0.0) {
      throw InvalidInput("basis vector has weight on a hidden coordinate");
    }
    for (std::size_t j = 0; j <= i; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(basis[i].dot(basis[j]) - expected) > kOrthoTol) throw InvalidInput("basis is not orthonormal");
    }
  }
}

}  // namespace

Index Alg1Config::resolved_samples(Index dim_visible) const {
  if (samples_per_round) return *samples_per_round;
  return static_cast<Index>(std::ceil(sample_multiplier * lambda_max * static_cast<double>(dim_visible) / epsilon));
}

std::vector<Vector> visible_standard_basis(const Vector& visible_mask) {
  std::vector<Vector> basis;
  for (Index i = 0; i < visible_mask.size(); ++i) {
    if (visible_mask(i) == 1.0) basis.push_back(Vector::Unit(visible_mask.size(), i));
  }
  return basis;
}

Alg1Result run_algorithm1(Environment& env, const Alg1Config& cfg) {
  if (!(cfg.epsilon > 0.0)) throw InvalidInput("alg1: epsilon must be positive");
  if (!(cfg.lambda_max > 0.0)) throw InvalidInput("alg1: lambda_max must be positive");
  if (!(cfg.sample_multiplier > 0.0)) throw InvalidInput("alg1: sample_multiplier must be positive");

  const Vector& mask = env.visible_mask();
  const Index dim = env.dim_total();
  std::vector<Vector> basis = cfg.basis.empty() ? visible_standard_basis(mask) : cfg.basis;
  check_basis(basis, mask);

  const Index n = cfg.resolved_samples(env.dim_visible());
  if (n < 1) throw InvalidInput("alg1: samples per round must be positive");

  // Round 0 publishes the zero rule; round i publishes basis[i-1]. The schedule
  // depends on cfg alone.
  std::vector<DecisionRule> rules;
  rules.push_back(DecisionRule::zero(dim));
  for (const auto& b : basis) rules.push_back({b});

  const int threads = cfg.parallel ? static_cast<int>(rules.size()) : 1;
  const std::vector<RoundBatch> batches = env.publish_many(rules, n, threads);
  std::vector<double> means;
  for (const auto& batch : batches) means.push_back(batch.outcomes.mean());

  Alg1Result result;
  result.mu_hat = means[0];
  result.nu_hat = Vector::Zero(dim);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double coord = means[i + 1] - result.mu_hat;
    result.nu_coords.push_back(coord);
    result.nu_hat += coord * basis[i];
  }
  result.round_means = means;
  result.rounds_used = static_cast<Index>(rules.size());
  result.samples_per_round = n;
  result.published = rules;

  const double norm = result.nu_hat.norm();
  if (norm <= 0.5 * cfg.epsilon || norm == 0.0) {
    result.no_improvement = true;
    result.omega_hat = DecisionRule::zero(dim);
  } else {
    result.omega_hat = {result.nu_hat / norm};
  }
  return result;
}

DecisionRule omega_mao(const ScenarioSpec& scenario) {
  const Vector nu = scenario.gaming_matrix().transpose() * scenario.true_params;
  const double norm = nu.norm();
  if (norm == 0.0) return DecisionRule::zero(scenario.dim_total);
  return {nu / norm};
}

double agent_outcome_regret(const Alg1Result& result, const ScenarioSpec& scenario) {
  return agent_outcome_exact(omega_mao(scenario), scenario) - agent_outcome_exact(result.omega_hat, scenario);
}

}  // namespace strategic
