#include "oracles.hpp"
#include "strategic/model.hpp"
#include "strategic/risk_min.hpp"
#include "strategic/scenario_io.hpp"

#include <doctest.h>

using namespace strategic;

namespace {

/// Point-mass world without noise: every batch is deterministic.
ScenarioSpec deterministic_world() {
  ScenarioSpec s = builtin_scenario("identity_d3");
  s.dist_kind = DistKind::kPointMass;
  s.mean = (Vector(3) << 0.5, -1.0, 2.0).finished();
  s.effort_matrix << 1, 0, 0, 0.5, 1, 0, 0, 0, 0.3;
  s.true_params = (Vector(3) << 1, 2, -1).finished();
  s.noise_sigma = 0.0;
  derive_moments(s);
  return s;
}

}  // namespace

TEST_CASE("decomposition sums to the exact risk") {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const ScenarioSpec s = oracle::random_scenario(gen, 3 + trial % 3, 2, trial % 2 == 0, trial % 4 ? 1.0 : 0.5);
    const Vector w = oracle::random_rule(gen, s);
    const RiskDecomposition d = risk_decomposition({w}, s);
    CHECK(d.total == doctest::Approx(oracle::risk(s, w)).epsilon(1e-12));
    CHECK(d.static_risk + d.gaming_risk + d.offset_c == doctest::Approx(d.total).epsilon(1e-12));
    CHECK(d.static_risk >= -1e-12);
    CHECK(d.gaming_risk >= 0.0);
  }
}

TEST_CASE("car insurance decomposition") {
  const ScenarioSpec s = builtin_scenario("car_insurance");
  // Weight on the minivan feature alone induces no effort: that row of M is zero.
  const RiskDecomposition minivan = risk_decomposition({(Vector(4) << 0, 1, 0, 0).finished()}, s);
  CHECK(minivan.gaming_risk == 0.0);
  const RiskDecomposition both = risk_decomposition({(Vector(4) << 0, 1, 1, 0).finished()}, s);
  CHECK(both.gaming_risk > 0.0);
  const RiskDecomposition truth = risk_decomposition({(Vector(4) << 0, 0, 1, 0).finished()}, s);
  CHECK(truth.total == doctest::Approx(oracle::risk(s, (Vector(4) << 0, 0, 1, 0).finished())));
}

TEST_CASE("deterministic world branch values") {
  const ScenarioSpec s = deterministic_world();
  Environment env(s, 3);
  std::mt19937_64 gen(2);
  for (int k = 0; k < 200; ++k) {
    const Vector w = oracle::random_rule(gen, s);
    const OracleQuery q = relaxed_risk_oracle(env, {w}, 10);
    const Vector gap = w - s.true_params;
    const double lift = gap.dot(s.mean + oracle::shift(s, w));
    CHECK((q.branch == OracleBranch::kGamed) == (lift > 0.0));
    const double expected = q.branch == OracleBranch::kGamed ? lift * lift : std::pow(gap.dot(s.mean), 2);
    CHECK(q.value == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("branch follows the decision and outcome means") {
  Environment env(builtin_scenario("car_insurance"), 5);
  std::mt19937_64 gen(4);
  int gamed = 0;
  for (int k = 0; k < 300; ++k) {
    const Vector w = oracle::random_rule(gen, builtin_scenario("car_insurance"));
    const OracleQuery q = relaxed_risk_oracle(env, {w}, 50);
    CHECK((q.branch == OracleBranch::kGamed) == (q.decision_mean > q.outcome_mean));
    gamed += q.branch == OracleBranch::kGamed;
  }
  CHECK(gamed > 0);
  CHECK(gamed < 300);
}

TEST_CASE("zero-rule pool replaces the zero-rule rounds") {
  const ScenarioSpec s = builtin_scenario("identity_d3");
  Environment env(s, 6);
  RelaxedRiskOracle oracle_(env);
  oracle_.reserve_zero_pool(1000);
  CHECK(oracle_.has_pool());
  const auto rounds_before = env.rounds();
  // ω = e₁/2 underestimates outcomes on average in this world.
  for (int k = 0; k < 30; ++k) {
    const OracleQuery q = oracle_.query({0.5 * Vector::Unit(3, 0)}, 100);
    CHECK(q.branch == OracleBranch::kUngamed);
  }
  CHECK(env.rounds() - rounds_before == 30);
  CHECK_THROWS_AS(oracle_.query({Vector::Zero(3)}, 1), InvalidInput);
}

TEST_CASE("weighted objective subtracts the mean outcome") {
  const ScenarioSpec s = deterministic_world();
  Environment a(s, 1), b(s, 1);
  const Vector w = (Vector(3) << 2, 0, 0).finished();
  const OracleQuery q = relaxed_risk_oracle(a, {w}, 5);
  const double weighted = weighted_objective_oracle(b, {w}, 5, 0.7);
  CHECK(weighted == doctest::Approx(q.value - 0.7 * q.outcome_mean));
}

TEST_CASE("minimization from a cold start on the identity world") {
  const ScenarioSpec s = builtin_scenario("identity_d3");
  Environment env(s, 10);
  ZoOptConfig cfg;
  cfg.start = DecisionRule{(Vector(3) << 2.0, 0.8, -0.6).finished()};
  cfg.seed = 3;
  const MinimizeRiskResult res = minimize_risk(env, cfg);
  CHECK(res.queries_used <= cfg.budget_queries);
  CHECK(res.trace.size() == static_cast<std::size_t>(res.queries_used));
  CHECK(risk_exact(res.best, s) < risk_exact(res.start, s));
  CHECK(risk_exact(res.best, s) <= 1.05 * 0.01);
}

TEST_CASE("ols start on the identity world is already near optimal") {
  const ScenarioSpec s = builtin_scenario("identity_d3");
  Environment env(s, 11);
  const DecisionRule start = ungamed_ols_start(env, 10000, 5.0);
  CHECK((start.weights - s.true_params).norm() < 0.01);
  const DecisionRule clipped = ungamed_ols_start(env, 10000, 0.5);
  CHECK(clipped.weights.norm() == doctest::Approx(0.5));
}

TEST_CASE("minimizer respects its domain and budget") {
  const ScenarioSpec s = builtin_scenario("car_insurance");
  Environment env(s, 12);
  ZoOptConfig cfg;
  cfg.budget_queries = 101;
  cfg.domain_radius = 0.5;
  const MinimizeRiskResult res = minimize_risk(env, cfg);
  CHECK(res.queries_used <= 101);
  CHECK(res.best.weights.norm() <= 0.5 + 1e-12);
  CHECK(res.best.weights(3) == 0.0);
  for (const auto& e : res.trace) CHECK(e.query.rule.weights(3) == 0.0);
  cfg.budget_queries = 0;
  CHECK_THROWS_AS(minimize_risk(env, cfg), InvalidInput);
}

TEST_CASE("same seed, same search") {
  const ScenarioSpec s = builtin_scenario("car_insurance");
  Environment a(s, 13), b(s, 13);
  ZoOptConfig cfg;
  cfg.budget_queries = 200;
  cfg.seed = 4;
  CHECK(minimize_risk(a, cfg).best.weights == minimize_risk(b, cfg).best.weights);
}
