#pragma once

// Test-side reference computations. Written directly from the model
// definitions with explicit loops and an independent sampler; they never
// call the library's objective code.

#include "strategic/scenario.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using strategic::Index;
using strategic::Matrix;
using strategic::ScenarioSpec;
using strategic::Vector;

inline Vector masked(const ScenarioSpec& s, const Vector& w) {
  Vector v = w;
  for (Index i = 0; i < v.size(); ++i) v(i) *= s.visible_mask(i);
  return v;
}

/// a = Mᵀ(Vω), then shift = M a.
inline Vector shift(const ScenarioSpec& s, const Vector& w) {
  const Vector vw = masked(s, w);
  Vector a = Vector::Zero(s.effort_matrix.cols());
  for (Index j = 0; j < a.size(); ++j)
    for (Index i = 0; i < vw.size(); ++i) a(j) += s.effort_matrix(i, j) * vw(i);
  Vector out = Vector::Zero(s.dim_total);
  for (Index i = 0; i < out.size(); ++i)
    for (Index j = 0; j < a.size(); ++j) out(i) += s.effort_matrix(i, j) * a(j);
  return out;
}

inline double agent_outcome(const ScenarioSpec& s, const Vector& w) {
  const Vector sh = shift(s, w);
  double base = 0.0, gain = 0.0;
  for (Index i = 0; i < s.dim_total; ++i) {
    base += s.true_params(i) * s.mean(i);
    gain += s.true_params(i) * sh(i);
  }
  return base + s.gaming_fraction * gain;
}

/// Mixture over gamers and non-gamers of E[(qᵀx_g − η)²].
inline double risk(const ScenarioSpec& s, const Vector& w) {
  const Vector q = masked(s, w) - s.true_params;
  const Vector sh = shift(s, w);
  const double quad = q.dot(s.second_moment * q);  // E[(qᵀx)²]
  const double qm = q.dot(s.mean);
  const double qs = q.dot(sh);
  const double honest = quad;
  const double gamed = quad + 2.0 * qm * qs + qs * qs;  // E[(qᵀx + qᵀs)²]
  const double p = s.gaming_fraction;
  return (1.0 - p) * honest + p * gamed + s.noise_sigma * s.noise_sigma;
}

inline double param_error(const ScenarioSpec& s, const Vector& w) {
  double acc = 0.0;
  for (Index i = 0; i < s.dim_total; ++i) {
    const double diff = s.visible_mask(i) * (w(i) - s.true_params(i));
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

/// Agent utility ωᵀV(x + Ma) − ½‖a‖² without the constant ωᵀVx.
inline double utility_gain(const ScenarioSpec& s, const Vector& w, const Vector& a) {
  return masked(s, w).dot(s.effort_matrix * a) - 0.5 * a.squaredNorm();
}

struct MonteCarlo {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Squared prediction error simulated with std::mt19937_64 and a Cholesky
/// factor (gaussian kind only).
inline MonteCarlo risk_monte_carlo(const ScenarioSpec& s, const Vector& w, Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Matrix cov = s.second_moment - s.mean * s.mean.transpose();
  Eigen::LDLT<Matrix> ldlt(cov);
  Matrix l = ldlt.matrixL();
  Vector d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  const Matrix root = ldlt.transpositionsP().transpose() * l * d.asDiagonal();
  const Vector vw = masked(s, w);
  const Vector sh = shift(s, w);
  double sum = 0.0, sum2 = 0.0;
  Vector e(s.dim_total);
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < e.size(); ++i) e(i) = z(gen);
    Vector x = s.mean + root * e;
    if (u(gen) < s.gaming_fraction) x += sh;
    const double err = vw.dot(x) - s.true_params.dot(x) - s.noise_sigma * z(gen);
    sum += err * err;
    sum2 += err * err * err * err;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sum2 / static_cast<double>(n) - mean * mean;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

inline double lambda_min(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Σ + μhᵀ + hμᵀ + hhᵀ with h = Gω.
inline double design_value(const Matrix& sigma, const Vector& mu, const Matrix& g, const Vector& w) {
  const Vector h = g * w;
  return lambda_min(sigma + mu * h.transpose() + h * mu.transpose() + h * h.transpose());
}

/// Closed-form smallest eigenvalue of a symmetric 2x2 matrix.
inline double lambda_min_2x2(double a, double b, double c) {
  const double mid = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return mid - rad;
}

/// Exhaustive search of the 2-D design objective on a square grid of the
/// given step over the disc of radius r.
inline double design_grid_2d(const Matrix& sigma, const Vector& mu, const Matrix& g, double r, double step) {
  double best = -INFINITY;
  const auto steps = static_cast<long>(std::round(r / step));
  for (long i = -steps; i <= steps; ++i) {
    const double w0 = static_cast<double>(i) * step;
    for (long j = -steps; j <= steps; ++j) {
      const double w1 = static_cast<double>(j) * step;
      if (w0 * w0 + w1 * w1 > r * r + 1e-12) continue;
      const double h0 = g(0, 0) * w0 + g(0, 1) * w1;
      const double h1 = g(1, 0) * w0 + g(1, 1) * w1;
      const double a = sigma(0, 0) + 2 * mu(0) * h0 + h0 * h0;
      const double b = sigma(0, 1) + mu(0) * h1 + h0 * mu(1) + h0 * h1;
      const double c = sigma(1, 1) + 2 * mu(1) * h1 + h1 * h1;
      best = std::max(best, lambda_min_2x2(a, b, c));
    }
  }
  return best;
}

/// Random search over the ball followed by shrinking local perturbations.
inline double design_random_search(const Matrix& sigma, const Vector& mu, const Matrix& g, double r, Index samples,
                                   std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Index d = mu.size();
  auto project = [r](Vector w) {
    const double nrm = w.norm();
    if (nrm > r) w *= r / nrm;
    return w;
  };
  auto random_point = [&] {
    Vector w(d);
    for (Index i = 0; i < d; ++i) w(i) = z(gen);
    w.normalize();
    return Vector(w * r * std::pow(u(gen), 1.0 / static_cast<double>(d)));
  };
  std::vector<std::pair<double, Vector>> top;
  Vector best_w = Vector::Zero(d);
  double best = design_value(sigma, mu, g, best_w);
  for (Index k = 0; k < samples; ++k) {
    Vector w = k % 4 == 0 ? Vector(random_point().normalized() * r) : random_point();
    const double v = design_value(sigma, mu, g, w);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  double scale = 0.1 * r;
  for (int round = 0; round < 40; ++round, scale *= 0.8) {
    for (int k = 0; k < 200; ++k) {
      Vector step(d);
      for (Index i = 0; i < d; ++i) step(i) = z(gen) * scale;
      const Vector w = project(best_w + step);
      const double v = design_value(sigma, mu, g, w);
      if (v > best) {
        best = v;
        best_w = w;
      }
    }
  }
  return best;
}

/// Gaussian world with random moments, effort matrix and target.
inline ScenarioSpec random_scenario(std::mt19937_64& gen, Index d, Index k, bool hide_one, double p = 1.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  ScenarioSpec s;
  s.name = "random";
  s.dim_total = d;
  s.visible_mask = Vector::Ones(d);
  if (hide_one && d > 1) s.visible_mask(d - 1) = 0.0;
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = z(gen);
  const Matrix cov = a * a.transpose() / static_cast<double>(d) + 0.1 * Matrix::Identity(d, d);
  s.mean = Vector(d);
  for (Index i = 0; i < d; ++i) s.mean(i) = 0.5 * z(gen);
  s.second_moment = cov + s.mean * s.mean.transpose();
  s.effort_matrix = Matrix(d, k);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < k; ++j) s.effort_matrix(i, j) = 0.5 * z(gen);
  s.true_params = Vector(d);
  for (Index i = 0; i < d; ++i) s.true_params(i) = z(gen);
  s.noise_sigma = 0.3;
  s.gaming_fraction = p;
  return s;
}

inline Vector random_rule(std::mt19937_64& gen, const ScenarioSpec& s, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Vector w(s.dim_total);
  for (Index i = 0; i < w.size(); ++i) w(i) = z(gen) * s.visible_mask(i);
  return w;
}

}  // namespace oracle
