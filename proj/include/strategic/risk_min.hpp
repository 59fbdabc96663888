#pragma once

#include "strategic/environment.hpp"
#include "strategic/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace strategic {

/// Risk split around the centered feature distribution so that the gaming
/// shift is uncorrelated with the features. With q = Vω − ω*, s = Gω:
///   static_risk = qᵀ(Σ − μμᵀ)q
///   gaming_risk = p·(qᵀs)²
///   offset_c    = (qᵀμ)² + 2p(qᵀμ)(qᵀs) + σ²
/// and total = risk_exact.
struct RiskDecomposition {
  double static_risk = 0.0;
  double gaming_risk = 0.0;
  double offset_c = 0.0;
  double total = 0.0;
};

RiskDecomposition risk_decomposition(const DecisionRule& rule, const ScenarioSpec& scenario);

enum class OracleBranch { kGamed, kUngamed };

std::string to_string(OracleBranch branch);

struct OracleQuery {
  DecisionRule rule;
  Index n = 0;
  OracleBranch branch = OracleBranch::kUngamed;
  double value = 0.0;          // mean squared error on the evaluation batch
  double decision_mean = 0.0;  // Ỹ on the decision batch
  double outcome_mean = 0.0;   // Y on the decision batch
};

/// Mean of ((Vω)ᵀx − y)² over a batch. Hidden coordinates of the batch are
/// zero, so Vω needs no masking.
double mean_squared_prediction_error(const DecisionRule& rule, const RoundBatch& batch);

/// Relaxed prediction-risk oracle. Draws a decision batch under the rule; if
/// the rule overestimates outcomes on it (Ỹ > Y, strict) the value comes from
/// a fresh batch under the rule, otherwise from a zero-rule batch.
///
/// With a zero-rule pool reserved, ungamed-branch queries read consecutive
/// slices of one pre-drawn zero-rule round instead of publishing ω = 0 again.
class RelaxedRiskOracle {
 public:
  explicit RelaxedRiskOracle(Environment& env) : env_(&env) {}

  void reserve_zero_pool(Index samples);
  bool has_pool() const { return pool_.size() > 0; }

  OracleQuery query(const DecisionRule& rule, Index n);

 private:
  RoundBatch zero_batch(Index n);

  Environment* env_;
  RoundBatch pool_;
  Index cursor_ = 0;
};

/// One-shot oracle query without a pool.
OracleQuery relaxed_risk_oracle(Environment& env, const DecisionRule& rule, Index n);

/// Relaxed risk minus alpha times the mean outcome of the decision batch.
double weighted_objective_oracle(Environment& env, const DecisionRule& rule, Index n, double alpha);

struct ZoOptConfig {
  Index budget_queries = 2000;
  Index samples_per_query = 1000;
  double initial_step = 0.1;
  double step_decay = 0.5;         // step_t = initial_step / (t+1)^decay
  double smoothing_radius = 0.05;  // δ of the two-point estimate
  double gradient_clip = 10.0;
  double domain_radius = 5.0;
  double alpha = 0.0;  // weight on the mean outcome (0 = pure risk)
  std::optional<DecisionRule> start;
  Index init_samples = 10000;  // zero-rule batch for the OLS start
  bool reuse_zero_pool = true;
  Index max_pool_samples = Index{1} << 21;
  Index eval_every = 25;  // iterations between evaluations of the averaged iterate
  std::uint64_t seed = 0;  // search directions
};

struct TraceEntry {
  Index query_index = 0;
  std::string role;  // start | probe_plus | probe_minus | eval
  OracleQuery query;
  double objective = 0.0;  // value − alpha·outcome_mean
};

struct MinimizeRiskResult {
  DecisionRule best;
  double best_objective = 0.0;
  DecisionRule start;
  double start_objective = 0.0;
  /// The start rule took the ungamed branch: it did not overestimate the
  /// gaming effect, so the convex-relaxation argument does not apply.
  bool start_underestimates = false;
  Index queries_used = 0;
  std::vector<TraceEntry> trace;
};

/// Ungamed OLS start: fit on one zero-rule batch, projected to the domain.
DecisionRule ungamed_ols_start(Environment& env, Index n, double domain_radius);

/// Zeroth-order projected descent on the relaxed (optionally weighted)
/// objective. Two-point random-direction gradient estimates with 1/√t step
/// decay; the tail average of the iterates is evaluated periodically and the
/// best evaluated rule (including the start) is returned.
MinimizeRiskResult minimize_risk(Environment& env, const ZoOptConfig& cfg);

}  // namespace strategic
