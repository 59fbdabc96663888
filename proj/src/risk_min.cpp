#include "strategic/risk_min.hpp"

#include "strategic/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace strategic {
namespace {

Vector project_ball(const Vector& w, double radius) {
  const double norm = w.norm();
  return norm > radius ? Vector(w * (radius / norm)) : w;
}

Vector random_visible_direction(const Vector& mask, CounterRng& rng) {
  std::normal_distribution<double> normal;
  Vector u(mask.size());
  double norm = 0.0;
  while (norm == 0.0) {
    for (Index i = 0; i < u.size(); ++i) u(i) = mask(i) == 1.0 ? normal(rng) : 0.0;
    norm = u.norm();
  }
  return u / norm;
}

void check_config(const ZoOptConfig& cfg) {
  if (cfg.budget_queries < 1) throw InvalidInput("minimize_risk: query budget exhausted before the first query");
  if (cfg.samples_per_query < 2) throw InvalidInput("minimize_risk: samples_per_query must be at least 2");
  if (!(cfg.initial_step > 0.0) || !(cfg.smoothing_radius > 0.0) || !(cfg.domain_radius > 0.0) ||
      !(cfg.gradient_clip > 0.0) || cfg.step_decay < 0.0 || cfg.eval_every < 1 || cfg.init_samples < 1) {
    throw InvalidInput("minimize_risk: step, smoothing, clip and domain parameters must be positive");
  }
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw InvalidInput("minimize_risk: alpha must be >= 0");
}

}  // namespace

RiskDecomposition risk_decomposition(const DecisionRule& rule, const ScenarioSpec& scenario) {
  const Vector s = feature_shift(rule, scenario);
  const Vector q = scenario.visible_mask.cwiseProduct(rule.weights) - scenario.true_params;
  const double p = scenario.gaming_fraction;
  const double qmu = q.dot(scenario.mean);
  const double qs = q.dot(s);

  RiskDecomposition out;
  out.static_risk = std::max(0.0, q.dot(scenario.covariance() * q));
  out.gaming_risk = p * qs * qs;
  out.offset_c = qmu * qmu + 2.0 * p * qmu * qs + scenario.noise_sigma * scenario.noise_sigma;
  out.total = out.static_risk + out.gaming_risk + out.offset_c;
  return out;
}

std::string to_string(OracleBranch branch) {
  return branch == OracleBranch::kGamed ? "gamed" : "ungamed";
}

double mean_squared_prediction_error(const DecisionRule& rule, const RoundBatch& batch) {
  const Vector err = batch.visible_features * rule.weights - batch.outcomes;
  return err.squaredNorm() / static_cast<double>(batch.size());
}

void RelaxedRiskOracle::reserve_zero_pool(Index samples) {
  if (samples < 1) throw InvalidInput("zero-rule pool needs at least one sample");
  pool_ = env_->publish_and_draw(DecisionRule::zero(env_->dim_total()), samples);
  cursor_ = 0;
}

RoundBatch RelaxedRiskOracle::zero_batch(Index n) {
  if (!has_pool()) return env_->publish_and_draw(DecisionRule::zero(env_->dim_total()), n);
  // Consecutive slices, wrapping around once the pool is used up.
  RoundBatch out;
  out.visible_features.resize(n, pool_.visible_features.cols());
  out.decisions = Vector::Zero(n);
  out.outcomes.resize(n);
  const Index total = pool_.size();
  for (Index i = 0; i < n; ++i) {
    const Index row = (cursor_ + i) % total;
    out.visible_features.row(i) = pool_.visible_features.row(row);
    out.outcomes(i) = pool_.outcomes(row);
  }
  cursor_ = (cursor_ + n) % total;
  return out;
}

OracleQuery RelaxedRiskOracle::query(const DecisionRule& rule, Index n) {
  if (n < 2) throw InvalidInput("relaxed risk oracle needs n >= 2");
  OracleQuery q;
  q.rule = rule;
  q.n = n;

  const RoundBatch decision = env_->publish_and_draw(rule, n);
  q.decision_mean = decision.decisions.mean();
  q.outcome_mean = decision.outcomes.mean();

  if (q.decision_mean > q.outcome_mean) {
    q.branch = OracleBranch::kGamed;
    q.value = mean_squared_prediction_error(rule, env_->publish_and_draw(rule, n));
  } else {
    q.branch = OracleBranch::kUngamed;
    q.value = mean_squared_prediction_error(rule, zero_batch(n));
  }
  return q;
}

OracleQuery relaxed_risk_oracle(Environment& env, const DecisionRule& rule, Index n) {
  RelaxedRiskOracle oracle(env);
  return oracle.query(rule, n);
}

double weighted_objective_oracle(Environment& env, const DecisionRule& rule, Index n, double alpha) {
  if (!(alpha >= 0.0)) throw InvalidInput("weighted objective needs alpha >= 0");
  const OracleQuery q = relaxed_risk_oracle(env, rule, n);
  return q.value - alpha * q.outcome_mean;
}

DecisionRule ungamed_ols_start(Environment& env, Index n, double domain_radius) {
  const RoundBatch batch = env.publish_and_draw(DecisionRule::zero(env.dim_total()), n);
  Vector w = ols_fit(batch.visible_features, batch.outcomes).coefficients;
  w = env.visible_mask().cwiseProduct(w);
  return {project_ball(w, domain_radius)};
}

MinimizeRiskResult minimize_risk(Environment& env, const ZoOptConfig& cfg) {
  check_config(cfg);
  const Vector& mask = env.visible_mask();
  const Index n = cfg.samples_per_query;

  MinimizeRiskResult result;
  if (cfg.start) {
    check_rule(*cfg.start, mask);
    result.start = {project_ball(cfg.start->weights, cfg.domain_radius)};
  } else {
    result.start = ungamed_ols_start(env, cfg.init_samples, cfg.domain_radius);
  }

  RelaxedRiskOracle oracle(env);
  if (cfg.reuse_zero_pool) {
    oracle.reserve_zero_pool(std::min(cfg.max_pool_samples, cfg.budget_queries * n));
  }

  auto ask = [&](const Vector& w, const char* role) {
    TraceEntry entry;
    entry.query_index = result.queries_used++;
    entry.role = role;
    entry.query = oracle.query({w}, n);
    entry.objective = entry.query.value - cfg.alpha * entry.query.outcome_mean;
    result.trace.push_back(entry);
    return entry;
  };

  const TraceEntry first = ask(result.start.weights, "start");
  result.start_objective = first.objective;
  result.start_underestimates = first.query.branch == OracleBranch::kUngamed;
  result.best = result.start;
  result.best_objective = first.objective;

  const Index budget = cfg.budget_queries;
  const double per_iter = 2.0 + 1.0 / (2.0 * static_cast<double>(cfg.eval_every));
  const auto planned = static_cast<Index>(static_cast<double>(budget - 1) / per_iter);
  const Index tail_start = planned / 2;

  CounterRng rng(derive_seed(cfg.seed, 0, "zo-directions"));
  Vector w = result.start.weights;
  Vector tail_sum = Vector::Zero(w.size());
  Index tail_count = 0;

  auto evaluate_average = [&] {
    const Vector avg = tail_sum / static_cast<double>(tail_count);
    const TraceEntry e = ask(avg, "eval");
    if (e.objective < result.best_objective) {
      result.best = {avg};
      result.best_objective = e.objective;
    }
  };

  const double delta = cfg.smoothing_radius;
  const auto dim = static_cast<double>(env.dim_visible());
  Index t = 0;
  while (budget - result.queries_used >= 3) {
    const Vector u = random_visible_direction(mask, rng);
    const double f_plus = ask(w + delta * u, "probe_plus").objective;
    const double f_minus = ask(w - delta * u, "probe_minus").objective;
    Vector g = (dim * (f_plus - f_minus) / (2.0 * delta)) * u;
    const double gnorm = g.norm();
    if (gnorm > cfg.gradient_clip) g *= cfg.gradient_clip / gnorm;

    const double step = cfg.initial_step / std::pow(static_cast<double>(t + 1), cfg.step_decay);
    w = project_ball(w - step * g, cfg.domain_radius);
    ++t;

    if (t > tail_start) {
      tail_sum += w;
      ++tail_count;
      if (tail_count % cfg.eval_every == 0 && budget - result.queries_used >= 3) evaluate_average();
    }
  }
  if (tail_count == 0 && t > 0) {
    tail_sum = w;
    tail_count = 1;
  }
  if (tail_count > 0 && result.queries_used < budget) evaluate_average();
  return result;
}

}  // namespace strategic
