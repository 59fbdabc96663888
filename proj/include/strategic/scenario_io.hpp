#pragma once

#include "strategic/scenario.hpp"

#include <string>
#include <vector>

namespace strategic {

inline constexpr int kScenarioSchemaVersion = 1;

/// Names accepted by builtin_scenario.
std::vector<std::string> builtin_scenario_names();

/// Built-in worlds. Throws InvalidInput for unknown names.
///  - car_insurance: own car, minivan, motorcycle license visible; defensive
///    driving hidden. Gaussian features with fixed, arbitrary moments.
///  - identity_d3: V = M = Σ = I, ω* = e₁, σ = 0.1.
///  - weak_direction_d3: V = M = I, covariance diag(1, 1, 1e-3), σ = 1.
ScenarioSpec builtin_scenario(const std::string& name);

/// Parse a scenario document (YAML). Errors carry the offending line.
ScenarioSpec parse_scenario(const std::string& text);

/// A builtin name, or a path to a scenario file.
ScenarioSpec load_scenario(const std::string& path_or_name);

std::string dump_scenario(const ScenarioSpec& scenario);

}  // namespace strategic
