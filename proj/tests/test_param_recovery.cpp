#include "oracles.hpp"
#include "strategic/param_recovery.hpp"
#include "strategic/scenario_io.hpp"

#include <doctest.h>

using namespace strategic;

TEST_CASE("post-gaming moment formula") {
  std::mt19937_64 gen(1);
  const ScenarioSpec s = oracle::random_scenario(gen, 3, 2, false);
  const Matrix g = s.gaming_matrix();
  const Vector w = oracle::random_rule(gen, s);
  const Vector h = g * w;
  const Matrix want = s.second_moment + s.mean * h.transpose() + h * s.mean.transpose() + h * h.transpose();
  CHECK((post_gaming_moment(s.second_moment, s.mean, g, w) - want).norm() < 1e-12);
  CHECK(design_objective(s.second_moment, s.mean, g, w) ==
        doctest::Approx(oracle::design_value(s.second_moment, s.mean, g, w)));
}

TEST_CASE("design on the axis-aligned degenerate case") {
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 0) = 1.0;
  const DesignResult r = design_omega(sigma, Vector::Zero(2), Matrix::Identity(2, 2), 1.0, 400);
  CHECK(r.achieved_lambda_min == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(r.omega_design.weights(1)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.baseline_lambda_min == doctest::Approx(0.0));
}

TEST_CASE("design never does worse than the zero rule") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 10; ++trial) {
    const ScenarioSpec s = oracle::random_scenario(gen, 3, 1, false);
    const Matrix g = s.gaming_matrix();
    const DesignResult r = design_omega(s.second_moment, s.mean, g, 1.0, 200, trial);
    CHECK(r.achieved_lambda_min >= r.baseline_lambda_min - 1e-12);
    CHECK(r.omega_design.weights.norm() <= 1.0 + 1e-12);
    CHECK(r.achieved_lambda_min ==
          doctest::Approx(oracle::design_value(s.second_moment, s.mean, g, r.omega_design.weights)));
  }
}

TEST_CASE("gaming matrix estimate") {
  const ScenarioSpec s = builtin_scenario("weak_direction_d3");
  Environment env(s, 4);
  const GEstimate est = estimate_g(env, s.mean, 20000);
  CHECK(env.rounds() == 3);
  CHECK((est.g_hat - s.gaming_matrix()).cwiseAbs().maxCoeff() < 0.05);
  CHECK(est.column_samples == std::vector<Index>{20000, 20000, 20000});
}

TEST_CASE("recovery on the weak-direction world") {
  const ScenarioSpec s = builtin_scenario("weak_direction_d3");
  Environment env(s, 5);
  Alg3Config cfg;
  cfg.kappa_min_bound = 1e-3;
  const Alg3Result res = run_algorithm3(env, cfg);
  CHECK(res.diagnostics.rounds_used == 5);
  CHECK(env.rounds() == 5);
  CHECK(static_cast<Index>(env.samples_drawn()) == res.diagnostics.samples_used);
  CHECK(res.diagnostics.n1 == 900000);
  CHECK(res.design.achieved_lambda_min > 100 * res.design.baseline_lambda_min);
  CHECK((res.fit.coefficients - s.true_params).norm() <= 0.1);
}

TEST_CASE("explicit stage sizes and the no-design ablation") {
  const ScenarioSpec s = builtin_scenario("identity_d3");
  Environment env(s, 6);
  Alg3Config cfg;
  cfg.n1 = 500;
  cfg.n2 = 400;
  cfg.n3 = 300;
  cfg.use_design = false;
  const Alg3Result res = run_algorithm3(env, cfg);
  CHECK(res.design.omega_design.weights.norm() == 0.0);
  CHECK(res.diagnostics.samples_used == 500 + 3 * 400 + 300);
  CHECK(res.fit.n_samples == 300);
}

TEST_CASE("hidden features are out of scope") {
  Environment env(builtin_scenario("car_insurance"), 0);
  CHECK_THROWS_AS(run_algorithm3(env, Alg3Config{}), UnsupportedScope);
}

TEST_CASE("config errors") {
  Environment env(builtin_scenario("identity_d3"), 0);
  Alg3Config cfg;
  cfg.epsilon = -1;
  CHECK_THROWS_AS(run_algorithm3(env, cfg), InvalidInput);
  cfg = {};
  cfg.n3 = 1;
  CHECK_THROWS_AS(run_algorithm3(env, cfg), InvalidInput);
}
