#pragma once

#include "strategic/common.hpp"
#include "strategic/model.hpp"
#include "strategic/rng.hpp"
#include "strategic/scenario.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace strategic {

/// The decision-maker's view of one round. Hidden coordinates of every row
/// of `visible_features` are exactly zero.
struct RoundBatch {
  Matrix visible_features;  // n × d′, rows are V x_g
  Vector decisions;         // ωᵀ V x_g
  Vector outcomes;          // y

  Index size() const { return outcomes.size(); }
};

namespace diagnostics {

/// Draws initial feature vectors x ~ P.
class FeatureSampler {
 public:
  explicit FeatureSampler(const ScenarioSpec& scenario);

  /// n × d′ matrix of independent draws.
  Matrix sample(Index n, CounterRng& rng) const;

 private:
  DistKind kind_;
  Vector mean_;
  Matrix root_;  // symmetric square root of the covariance
  std::vector<double> cumulative_;
  std::vector<Vector> atoms_;
  std::optional<Index> homogeneous_;
};

/// Everything that happened in a round, including what the decision-maker
/// never sees. Used by tests to check the gaming law; never handed to
/// algorithm code.
struct FullRound {
  Matrix initial;             // x
  Matrix gamed;               // x_g
  std::vector<bool> is_gamer;
  Vector noise;               // η
  Vector outcomes;            // y = ω*ᵀx_g + η
};

FullRound simulate_round(const ScenarioSpec& scenario, const FeatureSampler& sampler, const DecisionRule& rule,
                         Index n, CounterRng& rng);

}  // namespace diagnostics

/// Simulated population behind the information barrier. The only ways to
/// learn about the world are publish_and_draw and the visibility mask (the
/// decision-maker knows which features it observes).
///
/// Single-threaded. For parallel work, fork() into independent handles.
class Environment {
 public:
  Environment(ScenarioSpec scenario, std::uint64_t seed);

  /// Publish `rule`, let n fresh agents arrive and game, and return what the
  /// decision-maker observes.
  RoundBatch publish_and_draw(const DecisionRule& rule, Index n);

  /// Publish several rules at once, each to its own group of n agents. Same
  /// result as publishing them one after another; `threads` > 1 draws the
  /// groups concurrently.
  std::vector<RoundBatch> publish_many(const std::vector<DecisionRule>& rules, Index n, int threads = 1);

  /// Independent handle on the same world with a sub-seed derived from this
  /// handle's seed and `stream`. Counters start at zero.
  Environment fork(std::uint64_t stream) const;

  Index dim_total() const;
  Index dim_visible() const;
  const Vector& visible_mask() const;

  std::uint64_t rounds() const { return rounds_; }
  std::uint64_t samples_drawn() const { return samples_; }

 private:
  struct World;
  Environment(std::shared_ptr<const World> world, std::uint64_t seed);
  RoundBatch draw_round(const DecisionRule& rule, Index n, std::uint64_t round_index) const;

  std::shared_ptr<const World> world_;
  std::uint64_t seed_;
  std::uint64_t rounds_ = 0;
  std::uint64_t samples_ = 0;
};

}  // namespace strategic
