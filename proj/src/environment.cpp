#include "strategic/environment.hpp"

#include <algorithm>
#include <random>
#include <thread>

namespace strategic {
namespace diagnostics {

FeatureSampler::FeatureSampler(const ScenarioSpec& scenario)
    : kind_(scenario.dist_kind), mean_(scenario.mean), homogeneous_(scenario.homogeneous_coord) {
  if (kind_ == DistKind::kGaussian) {
    Matrix cov = scenario.covariance();
    cov = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    const Vector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    root_ = solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
  } else if (kind_ == DistKind::kFiniteMixture) {
    double total = 0.0;
    for (const auto& atom : scenario.atoms) {
      total += atom.weight;
      cumulative_.push_back(total);
      atoms_.push_back(atom.point);
    }
    for (double& c : cumulative_) c /= total;
  }
}

Matrix FeatureSampler::sample(Index n, CounterRng& rng) const {
  const Index d = mean_.size();
  Matrix x(n, d);
  switch (kind_) {
    case DistKind::kGaussian: {
      std::normal_distribution<double> normal;
      Matrix z(n, d);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) z(i, j) = normal(rng);
      x = z * root_;  // root_ is symmetric
      x.rowwise() += mean_.transpose();
      break;
    }
    case DistKind::kPointMass:
      x = mean_.transpose().replicate(n, 1);
      break;
    case DistKind::kFiniteMixture:
      for (Index i = 0; i < n; ++i) {
        const double u = rng.uniform();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto k = std::min<std::size_t>(it - cumulative_.begin(), atoms_.size() - 1);
        x.row(i) = atoms_[k].transpose();
      }
      break;
  }
  if (homogeneous_) x.col(*homogeneous_).setOnes();
  return x;
}

FullRound simulate_round(const ScenarioSpec& scenario, const FeatureSampler& sampler, const DecisionRule& rule,
                         Index n, CounterRng& rng) {
  if (n < 1) throw InvalidInput("a round needs at least one agent");
  const Vector shift = feature_shift(rule, scenario);

  FullRound round;
  round.initial = sampler.sample(n, rng);
  round.gamed = round.initial;
  round.is_gamer.assign(static_cast<std::size_t>(n), false);
  round.noise = Vector::Zero(n);

  std::normal_distribution<double> normal;
  for (Index i = 0; i < n; ++i) {
    const bool games = rng.uniform() < scenario.gaming_fraction;
    round.is_gamer[static_cast<std::size_t>(i)] = games;
    if (games) round.gamed.row(i) += shift.transpose();
    if (scenario.noise_sigma > 0.0) round.noise(i) = scenario.noise_sigma * normal(rng);
  }
  round.outcomes = round.gamed * scenario.true_params + round.noise;
  return round;
}

}  // namespace diagnostics

struct Environment::World {
  explicit World(ScenarioSpec s) : scenario(std::move(s)), sampler(scenario) {}
  ScenarioSpec scenario;
  diagnostics::FeatureSampler sampler;
};

Environment::Environment(ScenarioSpec scenario, std::uint64_t seed) : seed_(seed) {
  validate(scenario);
  world_ = std::make_shared<const World>(std::move(scenario));
}

Environment::Environment(std::shared_ptr<const World> world, std::uint64_t seed)
    : world_(std::move(world)), seed_(seed) {}

RoundBatch Environment::draw_round(const DecisionRule& rule, Index n, std::uint64_t round_index) const {
  const ScenarioSpec& s = world_->scenario;
  CounterRng rng(derive_seed(seed_, round_index, "round"));
  diagnostics::FullRound round = diagnostics::simulate_round(s, world_->sampler, rule, n, rng);

  RoundBatch batch;
  batch.visible_features = round.gamed * s.visible_mask.asDiagonal();
  batch.decisions = batch.visible_features * rule.weights;
  batch.outcomes = std::move(round.outcomes);
  return batch;
}

RoundBatch Environment::publish_and_draw(const DecisionRule& rule, Index n) {
  if (n < 1) throw InvalidInput("publish_and_draw needs n >= 1");
  check_rule(rule, world_->scenario.visible_mask);
  RoundBatch batch = draw_round(rule, n, rounds_);
  ++rounds_;
  samples_ += static_cast<std::uint64_t>(n);
  return batch;
}

std::vector<RoundBatch> Environment::publish_many(const std::vector<DecisionRule>& rules, Index n, int threads) {
  if (n < 1) throw InvalidInput("publish_many needs n >= 1");
  for (const auto& rule : rules) check_rule(rule, world_->scenario.visible_mask);

  std::vector<RoundBatch> batches(rules.size());
  const std::uint64_t first = rounds_;
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || rules.size() < 2) {
    for (std::size_t r = 0; r < rules.size(); ++r) batches[r] = draw_round(rules[r], n, first + r);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, rules.size()); ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < rules.size(); r += workers) batches[r] = draw_round(rules[r], n, first + r);
      });
    }
    for (auto& t : pool) t.join();
  }
  rounds_ += rules.size();
  samples_ += rules.size() * static_cast<std::uint64_t>(n);
  return batches;
}

Environment Environment::fork(std::uint64_t stream) const {
  return Environment(world_, derive_seed(seed_, stream, "fork"));
}

Index Environment::dim_total() const { return world_->scenario.dim_total; }
Index Environment::dim_visible() const { return world_->scenario.dim_visible(); }
const Vector& Environment::visible_mask() const { return world_->scenario.visible_mask; }

}  // namespace strategic
