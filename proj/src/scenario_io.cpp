#include "strategic/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace strategic {
namespace {

std::string at_line(const YAML::Node& node) {
  if (!node || node.Mark().is_null()) return "";
  return " (line " + std::to_string(node.Mark().line + 1) + ")";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  throw InvalidInput("scenario: " + what + at_line(node));
}

YAML::Node required(const YAML::Node& root, const char* key) {
  YAML::Node node = root[key];
  if (!node) fail(root, std::string("missing field '") + key + "'");
  return node;
}

double to_double(const YAML::Node& node, const std::string& what) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(node, what + " must be a number");
  }
}

Vector to_vector(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) fail(node, what + " must be a list of numbers");
  Vector v(static_cast<Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v(static_cast<Index>(i)) = to_double(node[i], what);
  return v;
}

Matrix to_matrix(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() == 0) fail(node, what + " must be a non-empty list of rows");
  const auto rows = static_cast<Index>(node.size());
  const Vector first = to_vector(node[0], what);
  Matrix m(rows, first.size());
  for (Index r = 0; r < rows; ++r) {
    const Vector row = to_vector(node[static_cast<std::size_t>(r)], what);
    if (row.size() != first.size()) fail(node[static_cast<std::size_t>(r)], what + " rows must have equal length");
    m.row(r) = row.transpose();
  }
  return m;
}

// Σ = C + μμᵀ with unit variances and correlation 0.6 between the minivan
// and defensive-driving features.
ScenarioSpec car_insurance() {
  ScenarioSpec s;
  s.name = "car_insurance";
  s.dim_total = 4;
  s.visible_mask = (Vector(4) << 1, 1, 1, 0).finished();
  s.mean = (Vector(4) << 0.5, 0.3, 0.2, 0.4).finished();
  Matrix cov = Matrix::Identity(4, 4);
  cov(1, 3) = cov(3, 1) = 0.6;
  s.second_moment = cov + s.mean * s.mean.transpose();
  s.dist_kind = DistKind::kGaussian;
  s.effort_matrix.resize(4, 2);
  s.effort_matrix << 1, 0,  //
      0, 0,                 //
      0, 1,                 //
      2, -2;
  s.true_params = (Vector(4) << 0, 0, 1, 1).finished();
  s.noise_sigma = 0.1;
  s.gaming_fraction = 1.0;
  return s;
}

ScenarioSpec identity_d3() {
  ScenarioSpec s;
  s.name = "identity_d3";
  s.dim_total = 3;
  s.visible_mask = Vector::Ones(3);
  s.mean = Vector::Zero(3);
  s.second_moment = Matrix::Identity(3, 3);
  s.effort_matrix = Matrix::Identity(3, 3);
  s.true_params = Vector::Unit(3, 0);
  s.noise_sigma = 0.1;
  s.gaming_fraction = 1.0;
  return s;
}

ScenarioSpec weak_direction_d3() {
  ScenarioSpec s;
  s.name = "weak_direction_d3";
  s.dim_total = 3;
  s.visible_mask = Vector::Ones(3);
  s.mean = Vector::Zero(3);
  s.second_moment = (Vector(3) << 1.0, 1.0, 1e-3).finished().asDiagonal();
  s.effort_matrix = Matrix::Identity(3, 3);
  s.true_params = (Vector(3) << 1.0, -0.5, 0.8).finished();
  s.noise_sigma = 1.0;
  s.gaming_fraction = 1.0;
  return s;
}

void emit_vector(YAML::Emitter& out, const Vector& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Index i = 0; i < v.size(); ++i) out << v(i);
  out << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter& out, const Matrix& m) {
  out << YAML::BeginSeq;
  for (Index r = 0; r < m.rows(); ++r) emit_vector(out, m.row(r).transpose());
  out << YAML::EndSeq;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() { return {"car_insurance", "identity_d3", "weak_direction_d3"}; }

ScenarioSpec builtin_scenario(const std::string& name) {
  ScenarioSpec s;
  if (name == "car_insurance") {
    s = car_insurance();
  } else if (name == "identity_d3") {
    s = identity_d3();
  } else if (name == "weak_direction_d3") {
    s = weak_direction_d3();
  } else {
    throw InvalidInput("unknown builtin scenario '" + name + "'");
  }
  validate(s);
  return s;
}

ScenarioSpec parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw InvalidInput("scenario: malformed document (line " + std::to_string(e.mark.line + 1) + "): " + e.msg);
  }
  if (!root.IsMap()) throw InvalidInput("scenario: document must be a mapping");

  const YAML::Node schema = required(root, "schema");
  if (to_double(schema, "schema") != kScenarioSchemaVersion) {
    fail(schema, "unsupported schema version (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }

  ScenarioSpec s;
  s.name = root["name"] ? root["name"].as<std::string>() : "unnamed";
  const double dim = to_double(required(root, "dim_total"), "dim_total");
  if (dim != std::floor(dim) || dim < 1) fail(root["dim_total"], "dim_total must be a positive integer");
  s.dim_total = static_cast<Index>(dim);
  s.visible_mask = to_vector(required(root, "visible_mask"), "visible_mask");
  s.effort_matrix = to_matrix(required(root, "effort_matrix"), "effort_matrix");
  s.true_params = to_vector(required(root, "true_params"), "true_params");
  s.noise_sigma = to_double(required(root, "noise_sigma"), "noise_sigma");
  s.gaming_fraction = to_double(required(root, "gaming_fraction"), "gaming_fraction");
  if (root["homogeneous_coord"]) {
    const double h = to_double(root["homogeneous_coord"], "homogeneous_coord");
    if (h != std::floor(h)) fail(root["homogeneous_coord"], "homogeneous_coord must be an integer");
    s.homogeneous_coord = static_cast<Index>(h);
  }

  const YAML::Node dist = required(root, "distribution");
  if (!dist.IsMap()) fail(dist, "distribution must be a mapping with a 'kind'");
  try {
    s.dist_kind = dist_kind_from_string(required(dist, "kind").as<std::string>());
  } catch (const InvalidInput& e) {
    fail(dist["kind"], e.what());
  }
  if (s.dist_kind == DistKind::kFiniteMixture) {
    const YAML::Node atoms = required(dist, "atoms");
    if (!atoms.IsSequence()) fail(atoms, "atoms must be a list");
    for (const auto& atom : atoms) {
      s.atoms.push_back({to_double(required(atom, "weight"), "atom weight"), to_vector(required(atom, "point"), "atom point")});
    }
  }

  // μ and Σ may be omitted where the distribution determines them.
  if (root["mean"]) {
    s.mean = to_vector(root["mean"], "mean");
  } else if (s.dist_kind != DistKind::kFiniteMixture) {
    required(root, "mean");
  }
  if (root["second_moment"]) {
    s.second_moment = to_matrix(root["second_moment"], "second_moment");
  } else if (s.dist_kind == DistKind::kGaussian) {
    required(root, "second_moment");
  } else if (s.dist_kind == DistKind::kPointMass) {
    s.second_moment = s.mean * s.mean.transpose();
  }
  if (s.dist_kind == DistKind::kFiniteMixture) {
    ScenarioSpec derived = s;
    try {
      derive_moments(derived);
    } catch (const ScenarioError& e) {
      fail(dist, e.what());
    }
    if (!root["mean"]) s.mean = derived.mean;
    if (!root["second_moment"]) s.second_moment = derived.second_moment;
  }

  try {
    validate(s);
  } catch (const ScenarioError& e) {
    const YAML::Node node = root[e.field()];
    throw ScenarioError(e.field(), std::string(e.what()) + at_line(node ? node : root));
  }
  return s;
}

ScenarioSpec load_scenario(const std::string& path_or_name) {
  for (const auto& name : builtin_scenario_names()) {
    if (name == path_or_name) return builtin_scenario(name);
  }
  std::ifstream in(path_or_name);
  if (!in) {
    throw InvalidInput("scenario '" + path_or_name + "' is neither a builtin fixture nor a readable file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    ScenarioSpec s = parse_scenario(buffer.str());
    if (s.name == "unnamed") s.name = std::filesystem::path(path_or_name).stem().string();
    return s;
  } catch (const InvalidInput& e) {
    throw InvalidInput(path_or_name + ": " + e.what());
  }
}

std::string dump_scenario(const ScenarioSpec& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "schema" << YAML::Value << kScenarioSchemaVersion;
  out << YAML::Key << "name" << YAML::Value << s.name;
  out << YAML::Key << "dim_total" << YAML::Value << s.dim_total;
  out << YAML::Key << "visible_mask" << YAML::Value;
  emit_vector(out, s.visible_mask);
  out << YAML::Key << "mean" << YAML::Value;
  emit_vector(out, s.mean);
  out << YAML::Key << "second_moment" << YAML::Value;
  emit_matrix(out, s.second_moment);
  out << YAML::Key << "distribution" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(s.dist_kind);
  if (s.dist_kind == DistKind::kFiniteMixture) {
    out << YAML::Key << "atoms" << YAML::Value << YAML::BeginSeq;
    for (const auto& atom : s.atoms) {
      out << YAML::BeginMap << YAML::Key << "weight" << YAML::Value << atom.weight;
      out << YAML::Key << "point" << YAML::Value;
      emit_vector(out, atom.point);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  out << YAML::Key << "effort_matrix" << YAML::Value;
  emit_matrix(out, s.effort_matrix);
  out << YAML::Key << "true_params" << YAML::Value;
  emit_vector(out, s.true_params);
  out << YAML::Key << "noise_sigma" << YAML::Value << s.noise_sigma;
  out << YAML::Key << "gaming_fraction" << YAML::Value << s.gaming_fraction;
  if (s.homogeneous_coord) out << YAML::Key << "homogeneous_coord" << YAML::Value << *s.homogeneous_coord;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace strategic
