#pragma once

#include "strategic/environment.hpp"
#include "strategic/estimators.hpp"
#include "strategic/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace strategic {

struct Alg3Config {
  double epsilon = 0.1;
  std::optional<Index> n1;
  std::optional<Index> n2;
  std::optional<Index> n3;
  /// Constant in front of every default stage size.
  double sample_multiplier = 100.0;
  /// Prior bounds the default stage sizes are computed from:
  /// k1 ≥ λ_max(GᵀG), k2 ≥ ‖Σ‖², kappa_min ≤ λ_min(Σ).
  double k1_bound = 1.0;
  double k2_bound = 1.0;
  double kappa_min_bound = 1.0;
  /// Target E‖Ĝ − G‖²_F for the probe rounds; defaults to epsilon.
  std::optional<double> g_accuracy;
  double domain_radius = 1.0;
  Index design_iters = 400;
  bool use_design = true;
  Index max_stage_samples = 1'000'000;
  std::uint64_t seed = 0;  // random starts of the design search
};

struct GEstimate {
  Matrix g_hat;  // column i = mean feature vector under eᵢ minus μ̂
  std::vector<Index> column_samples;
};

struct DesignResult {
  DecisionRule omega_design;
  double achieved_lambda_min = 0.0;  // of the estimated post-gaming second moment
  double baseline_lambda_min = 0.0;  // λ_min(Σ̂)
  Index iterations = 0;
};

struct Alg3Diagnostics {
  Vector mu_hat;
  Matrix sigma_hat;
  GEstimate g;
  Index n1 = 0;
  Index n2 = 0;
  Index n3 = 0;
  Index rounds_used = 0;
  Index samples_used = 0;
};

struct Alg3Result {
  OlsFit fit;
  DesignResult design;
  Alg3Diagnostics diagnostics;
};

/// Estimated post-gaming second moment Σ̂ + μ̂hᵀ + hμ̂ᵀ + hhᵀ with h = Ĝω.
Matrix post_gaming_moment(const Matrix& sigma_hat, const Vector& mu_hat, const Matrix& g_hat, const Vector& omega);

/// λ_min of post_gaming_moment.
double design_objective(const Matrix& sigma_hat, const Vector& mu_hat, const Matrix& g_hat, const Vector& omega);

/// Probe each coordinate direction for n2 agents and record the mean shift.
/// Requires every feature to be visible.
GEstimate estimate_g(Environment& env, const Vector& mu_hat, Index n2);

/// Maximize λ_min of the estimated post-gaming second moment over
/// ‖ω‖ ≤ radius by projected supergradient ascent from several starts.
/// Falls back to ω = 0 when nothing beats it.
DesignResult design_omega(const Matrix& sigma_hat, const Vector& mu_hat, const Matrix& g_hat, double radius,
                          Index iters, std::uint64_t seed = 0);

/// Moments, Ĝ probes, design, then OLS on agents gamed under the design.
/// Uses d′ + 2 rounds.
Alg3Result run_algorithm3(Environment& env, const Alg3Config& cfg);

}  // namespace strategic
