#pragma once

#include "strategic/agent_outcomes.hpp"
#include "strategic/param_recovery.hpp"
#include "strategic/risk_min.hpp"
#include "strategic/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace strategic {

enum class Algorithm { kAlg1, kMinRisk, kAlg3, kEvaluate, kDecompose, kSweep };
enum class OutputFormat { kCsv, kJson };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);
std::string to_string(OutputFormat format);
OutputFormat output_format_from_string(const std::string& name);

struct ExperimentConfig {
  std::string scenario;  // builtin name or path
  Algorithm algorithm = Algorithm::kEvaluate;
  std::uint64_t seed = 0;
  Index replications = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::kCsv;
  bool oracle = false;  // emit ground-truth columns
  int threads = 1;

  Alg1Config alg1;
  ZoOptConfig zo;
  Alg3Config alg3;
  std::optional<Vector> rule;  // evaluate / decompose
  Index eval_samples = 10000;
  std::vector<double> alphas;  // sweep
  std::string trace_path;      // minrisk per-query trace CSV
};

/// Named numeric field. `oracle` marks values computed from ground truth.
struct Field {
  std::string name;
  double value = 0.0;
};

struct ResultRow {
  std::uint64_t seed = 0;  // replication sub-seed
  Index replication = 0;
  std::string algorithm;
  Vector rule;  // published / returned rule
  std::vector<Field> estimates;
  std::vector<Field> oracle;
  Index rounds_used = 0;
  Index samples_used = 0;
  double wall_time = 0.0;  // seconds; goes to the manifest, not the table
  std::string error;
  std::string details_json;  // nested diagnostics (alg3 stages), JSON output only
  std::vector<TraceEntry> trace;  // minrisk only
};

/// Columns of the result table for an algorithm, in output order.
std::vector<std::string> result_columns(Algorithm algorithm, Index dim_total, bool oracle);

/// Every column that is a function of ground truth.
const std::vector<std::string>& oracle_column_names();

/// Sub-seed of replication r: derive_seed(master, r, "replication").
std::uint64_t replication_seed(std::uint64_t master, Index replication);

/// Runs all replications (concurrently when threads > 1). Rows are ordered
/// by replication index. A failing replication yields a row with `error`
/// set; config or scenario problems throw InvalidInput before any work.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Weighted risk/outcome minimization for each alpha (same replication
/// seeds across alphas). Rows carry an "alpha" estimate.
std::vector<ResultRow> sweep_tradeoff(const ScenarioSpec& scenario, const std::vector<double>& alphas,
                                      const ExperimentConfig& cfg);

void write_rows(std::ostream& out, const std::vector<ResultRow>& rows, const ExperimentConfig& cfg, Index dim_total);
void write_trace_csv(std::ostream& out, const std::vector<ResultRow>& rows, const ScenarioSpec* oracle_scenario);

/// Sidecar manifest: schema and library versions, resolved config, timings.
std::string manifest_json(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows);

}  // namespace strategic
