#include "strategic/param_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace strategic {
namespace {

constexpr double kMultiplicityTol = 1e-9;
constexpr Index kRandomStarts = 8;

Vector project_ball(const Vector& w, double radius) {
  const double norm = w.norm();
  return norm > radius ? Vector(w * (radius / norm)) : w;
}

Index capped(double value, Index cap) {
  if (!std::isfinite(value) || value > static_cast<double>(cap)) return cap;
  return std::max<Index>(2, static_cast<Index>(std::ceil(value)));
}

// Supergradient of λ_min(Q(ω)). For an eigenvector v of the smallest
// eigenvalue, d(vᵀQv)/dω = 2 (vᵀ(μ̂ + Ĝω)) Ĝᵀv. Near-multiple eigenvalues
// average over the eigenspace.
Vector supergradient(const Matrix& sigma_hat, const Vector& mu_hat, const Matrix& g_hat, const Vector& omega,
                     double* value) {
  const Vector h = g_hat * omega;
  const Matrix q = post_gaming_moment(sigma_hat, mu_hat, g_hat, omega);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(q);
  const Vector& evals = solver.eigenvalues();
  *value = evals(0);

  const double scale = std::max(1.0, std::abs(evals(evals.size() - 1)));
  Vector grad = Vector::Zero(omega.size());
  Index count = 0;
  for (Index j = 0; j < evals.size() && evals(j) - evals(0) <= kMultiplicityTol * scale; ++j) {
    const Vector v = solver.eigenvectors().col(j);
    grad += 2.0 * v.dot(mu_hat + h) * (g_hat.transpose() * v);
    ++count;
  }
  return grad / static_cast<double>(count);
}

}  // namespace

Matrix post_gaming_moment(const Matrix& sigma_hat, const Vector& mu_hat, const Matrix& g_hat, const Vector& omega) {
  const Vector h = g_hat * omega;
  Matrix q = sigma_hat + mu_hat * h.transpose() + h * mu_hat.transpose() + h * h.transpose();
  return 0.5 * (q + q.transpose());
}

double design_objective(const Matrix& sigma_hat, const Vector& mu_hat, const Matrix& g_hat, const Vector& omega) {
  return min_eigenvalue(post_gaming_moment(sigma_hat, mu_hat, g_hat, omega)).value;
}

GEstimate estimate_g(Environment& env, const Vector& mu_hat, Index n2) {
  if (env.dim_visible() != env.dim_total()) {
    throw UnsupportedScope("parameter recovery requires every feature to be visible");
  }
  if (n2 < 1) throw InvalidInput("estimate_g needs n2 >= 1");
  const Index d = env.dim_total();
  if (mu_hat.size() != d) throw InvalidInput("estimate_g: mu_hat has the wrong length");

  GEstimate out;
  out.g_hat = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    const RoundBatch batch = env.publish_and_draw({Vector::Unit(d, i)}, n2);
    out.g_hat.col(i) = empirical_mean(batch.visible_features) - mu_hat;
    out.column_samples.push_back(n2);
  }
  return out;
}

DesignResult design_omega(const Matrix& sigma_hat, const Vector& mu_hat, const Matrix& g_hat, double radius,
                          Index iters, std::uint64_t seed) {
  const Index d = g_hat.cols();
  if (!(radius > 0.0)) throw InvalidInput("design_omega: radius must be positive");
  if (iters < 1) throw InvalidInput("design_omega: iters must be positive");
  if (sigma_hat.rows() != g_hat.rows() || mu_hat.size() != g_hat.rows()) {
    throw InvalidInput("design_omega: dimension mismatch");
  }
  if (!sigma_hat.allFinite() || !mu_hat.allFinite() || !g_hat.allFinite()) {
    throw InvalidInput("design_omega: non-finite inputs");
  }

  DesignResult result;
  result.baseline_lambda_min = design_objective(sigma_hat, mu_hat, g_hat, Vector::Zero(d));
  result.omega_design = DecisionRule::zero(d);
  result.achieved_lambda_min = result.baseline_lambda_min;

  // The objective is not concave in ω (it is a minimum of convex
  // quadratics), so ascend from several starts and keep the best iterate.
  std::vector<Vector> starts;
  starts.push_back(Vector::Zero(d));
  for (Index i = 0; i < d; ++i) {
    starts.push_back(radius * Vector::Unit(d, i));
    starts.push_back(-radius * Vector::Unit(d, i));
  }
  Eigen::JacobiSVD<Matrix> svd(g_hat, Eigen::ComputeThinV);
  for (Index i = 0; i < svd.matrixV().cols(); ++i) {
    if (svd.singularValues()(i) <= 0.0) continue;
    starts.push_back(radius * svd.matrixV().col(i));
    starts.push_back(-radius * svd.matrixV().col(i));
  }
  CounterRng rng(derive_seed(seed, 0, "design-starts"));
  std::normal_distribution<double> normal;
  for (Index k = 0; k < kRandomStarts; ++k) {
    Vector z(d);
    for (Index i = 0; i < d; ++i) z(i) = normal(rng);
    starts.push_back(radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) * z.normalized());
  }

  bool any_finite = std::isfinite(result.baseline_lambda_min);
  for (const Vector& start : starts) {
    Vector w = start;
    for (Index t = 0; t < iters; ++t) {
      double value = 0.0;
      const Vector grad = supergradient(sigma_hat, mu_hat, g_hat, w, &value);
      ++result.iterations;
      if (!std::isfinite(value)) break;
      any_finite = true;
      if (value > result.achieved_lambda_min) {
        result.achieved_lambda_min = value;
        result.omega_design = {w};
      }
      const double gnorm = grad.norm();
      if (gnorm == 0.0) break;
      const double step = radius / std::sqrt(static_cast<double>(t + 1));
      w = project_ball(w + (step / gnorm) * grad, radius);
    }
  }
  if (!any_finite) throw NumericalError("design_omega: no finite objective value");
  return result;
}

Alg3Result run_algorithm3(Environment& env, const Alg3Config& cfg) {
  if (!(cfg.epsilon > 0.0)) throw InvalidInput("alg3: epsilon must be positive");
  if (!(cfg.sample_multiplier > 0.0) || !(cfg.kappa_min_bound > 0.0) || !(cfg.k1_bound > 0.0) ||
      !(cfg.k2_bound > 0.0) || !(cfg.domain_radius > 0.0) ||
      cfg.design_iters < 1 || cfg.max_stage_samples < 2) {
    throw InvalidInput("alg3: sample multiplier, bounds, radius and iteration cap must be positive");
  }
  for (const auto& n : {cfg.n1, cfg.n2, cfg.n3}) {
    if (n && *n < 2) throw InvalidInput("alg3: explicit stage sizes must be at least 2");
  }
  if (cfg.g_accuracy && !(*cfg.g_accuracy > 0.0)) throw InvalidInput("alg3: g_accuracy must be positive");
  if (env.dim_visible() != env.dim_total()) {
    throw UnsupportedScope("parameter recovery requires every feature to be visible");
  }
  const Index d = env.dim_total();
  const auto dd = static_cast<double>(d);
  const double c = cfg.sample_multiplier;
  const std::uint64_t rounds_before = env.rounds();
  const std::uint64_t samples_before = env.samples_drawn();

  Alg3Result out;
  Alg3Diagnostics& diag = out.diagnostics;

  // Stage 1: initial moments under the zero rule.
  diag.n1 = cfg.n1.value_or(capped(
      c * std::max(dd * cfg.k1_bound / cfg.kappa_min_bound, dd * dd * cfg.k2_bound / cfg.kappa_min_bound),
      cfg.max_stage_samples));
  const RoundBatch initial = env.publish_and_draw(DecisionRule::zero(d), diag.n1);
  diag.mu_hat = empirical_mean(initial.visible_features);
  diag.sigma_hat = empirical_second_moment(initial.visible_features);

  // Stage 2: coordinate probes for Ĝ.
  const double g_target = cfg.g_accuracy.value_or(cfg.epsilon);
  diag.n2 = cfg.n2.value_or(capped(c * dd * dd * diag.sigma_hat.trace() / g_target, cfg.max_stage_samples));
  diag.g = estimate_g(env, diag.mu_hat, diag.n2);

  // Stage 3: informativeness-maximizing rule.
  if (cfg.use_design) {
    out.design = design_omega(diag.sigma_hat, diag.mu_hat, diag.g.g_hat, cfg.domain_radius, cfg.design_iters,
                              cfg.seed);
  } else {
    out.design.omega_design = DecisionRule::zero(d);
    out.design.baseline_lambda_min = min_eigenvalue(diag.sigma_hat).value;
    out.design.achieved_lambda_min = out.design.baseline_lambda_min;
  }

  // Stage 4: OLS on agents gamed under the design.
  const double kappa_hat = out.design.achieved_lambda_min;
  diag.n3 = cfg.n3.value_or(kappa_hat > 0.0 ? capped(c * dd / (cfg.epsilon * kappa_hat), cfg.max_stage_samples)
                                            : cfg.max_stage_samples);
  const RoundBatch final_batch = env.publish_and_draw(out.design.omega_design, diag.n3);
  out.fit = ols_fit(final_batch.visible_features, final_batch.outcomes);

  diag.rounds_used = static_cast<Index>(env.rounds() - rounds_before);
  diag.samples_used = static_cast<Index>(env.samples_drawn() - samples_before);
  return out;
}

}  // namespace strategic
