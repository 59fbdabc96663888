#include "strategic/experiment.hpp"

#include "strategic/scenario_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <ostream>
#include <thread>

#ifndef STRATEGIC_VERSION
#define STRATEGIC_VERSION "dev"
#endif

namespace strategic {
namespace {

using nlohmann::ordered_json;

const std::vector<std::string> kPrefix = {"seed", "replication", "algorithm", "rule_norm"};
const std::vector<std::string> kSuffix = {"rounds_used", "samples_used", "error"};

struct Schema {
  std::vector<std::string> estimates;
  std::vector<std::string> oracle;
};

Schema schema_for(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kAlg1:
      return {{"mu_hat", "nu_hat_norm", "no_improvement", "samples_per_round"},
              {"regret", "exact_ao", "exact_risk", "param_error"}};
    case Algorithm::kMinRisk:
    case Algorithm::kSweep:
      return {{"alpha", "best_objective", "start_objective", "start_underestimates", "queries_used"},
              {"exact_risk", "exact_ao", "param_error", "start_exact_risk"}};
    case Algorithm::kAlg3:
      return {{"kappa_min", "error_bound", "achieved_lambda_min", "baseline_lambda_min", "design_norm", "n1", "n2",
               "n3"},
              {"param_error", "exact_risk", "exact_ao"}};
    case Algorithm::kEvaluate:
      return {{"mean_decision", "mean_outcome", "mse"}, {"exact_ao", "exact_risk", "param_error"}};
    case Algorithm::kDecompose:
      return {{}, {"static_risk", "gaming_risk", "offset_c", "total", "exact_ao", "param_error"}};
  }
  return {};
}

void parallel_for(Index count, int threads, const std::function<void(Index)>& body) {
  const auto workers = static_cast<Index>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> pool;
  for (Index w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (Index i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string format_double(double v) { return fmt::format("{}", v); }

void add_objective_oracles(ResultRow& row, const ScenarioSpec& s, const Vector& rule) {
  const ObjectiveReport rep = evaluate_objectives({rule}, s);
  row.oracle.push_back({"exact_ao", rep.agent_outcome});
  row.oracle.push_back({"exact_risk", rep.prediction_risk});
  row.oracle.push_back({"param_error", rep.param_error});
}

void fill_minrisk(ResultRow& row, const MinimizeRiskResult& res, const ScenarioSpec& s, double alpha, bool oracle) {
  row.rule = res.best.weights;
  row.estimates = {{"alpha", alpha},
                   {"best_objective", res.best_objective},
                   {"start_objective", res.start_objective},
                   {"start_underestimates", res.start_underestimates ? 1.0 : 0.0},
                   {"queries_used", static_cast<double>(res.queries_used)}};
  if (oracle) {
    add_objective_oracles(row, s, row.rule);
    row.oracle.push_back({"start_exact_risk", risk_exact(res.start, s)});
  }
  row.trace = res.trace;
}

ResultRow run_one(const ScenarioSpec& s, const ExperimentConfig& cfg, Index r, std::optional<double> alpha) {
  ResultRow row;
  row.seed = replication_seed(cfg.seed, r);
  row.replication = r;
  row.algorithm = to_string(cfg.algorithm);
  row.rule = Vector::Zero(s.dim_total);

  const auto started = std::chrono::steady_clock::now();
  Environment env(s, row.seed);
  const std::uint64_t algo_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r), "algorithm");
  try {
    switch (cfg.algorithm) {
      case Algorithm::kAlg1: {
        Alg1Config c = cfg.alg1;
        c.parallel = c.parallel || cfg.threads > 1;
        const Alg1Result res = run_algorithm1(env, c);
        row.rule = res.omega_hat.weights;
        row.estimates = {{"mu_hat", res.mu_hat},
                         {"nu_hat_norm", res.nu_hat.norm()},
                         {"no_improvement", res.no_improvement ? 1.0 : 0.0},
                         {"samples_per_round", static_cast<double>(res.samples_per_round)}};
        if (cfg.oracle) {
          row.oracle.push_back({"regret", agent_outcome_regret(res, s)});
          add_objective_oracles(row, s, row.rule);
        }
        break;
      }
      case Algorithm::kMinRisk:
      case Algorithm::kSweep: {
        ZoOptConfig c = cfg.zo;
        if (alpha) c.alpha = *alpha;
        c.seed = algo_seed;
        fill_minrisk(row, minimize_risk(env, c), s, c.alpha, cfg.oracle);
        break;
      }
      case Algorithm::kAlg3: {
        Alg3Config c = cfg.alg3;
        c.seed = algo_seed;
        const Alg3Result res = run_algorithm3(env, c);
        row.rule = res.fit.coefficients;
        row.estimates = {{"kappa_min", res.fit.kappa_min},
                         {"error_bound", res.fit.error_bound},
                         {"achieved_lambda_min", res.design.achieved_lambda_min},
                         {"baseline_lambda_min", res.design.baseline_lambda_min},
                         {"design_norm", res.design.omega_design.weights.norm()},
                         {"n1", static_cast<double>(res.diagnostics.n1)},
                         {"n2", static_cast<double>(res.diagnostics.n2)},
                         {"n3", static_cast<double>(res.diagnostics.n3)}};
        if (cfg.oracle) {
          row.oracle.push_back({"param_error", (res.fit.coefficients - s.true_params).norm()});
          const ObjectiveReport rep = evaluate_objectives({res.fit.coefficients}, s);
          row.oracle.push_back({"exact_risk", rep.prediction_risk});
          row.oracle.push_back({"exact_ao", rep.agent_outcome});
        }
        auto to_json = [](const Matrix& m) {
          ordered_json rows = ordered_json::array();
          for (Index i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
          return rows;
        };
        const auto& d = res.diagnostics;
        ordered_json details;
        details["stage1"] = {{"n1", d.n1},
                             {"mu_hat", std::vector<double>(d.mu_hat.begin(), d.mu_hat.end())},
                             {"sigma_hat", to_json(d.sigma_hat)}};
        details["stage2"] = {{"n2", d.n2}, {"g_hat", to_json(d.g.g_hat)}};
        const Vector& wd = res.design.omega_design.weights;
        details["stage3"] = {{"omega_design", std::vector<double>(wd.begin(), wd.end())},
                             {"achieved_lambda_min", res.design.achieved_lambda_min},
                             {"baseline_lambda_min", res.design.baseline_lambda_min},
                             {"iterations", res.design.iterations}};
        details["stage4"] = {{"n3", d.n3},
                             {"kappa_min", res.fit.kappa_min},
                             {"error_bound", res.fit.error_bound},
                             {"rank", res.fit.rank}};
        row.details_json = details.dump();
        break;
      }
      case Algorithm::kEvaluate: {
        row.rule = *cfg.rule;
        const RoundBatch batch = env.publish_and_draw({row.rule}, cfg.eval_samples);
        row.estimates = {{"mean_decision", batch.decisions.mean()},
                         {"mean_outcome", batch.outcomes.mean()},
                         {"mse", mean_squared_prediction_error({row.rule}, batch)}};
        if (cfg.oracle) add_objective_oracles(row, s, row.rule);
        break;
      }
      case Algorithm::kDecompose: {
        row.rule = *cfg.rule;
        const RiskDecomposition dec = risk_decomposition({row.rule}, s);
        row.oracle = {{"static_risk", dec.static_risk}, {"gaming_risk", dec.gaming_risk},
                      {"offset_c", dec.offset_c},       {"total", dec.total},
                      {"exact_ao", agent_outcome_exact({row.rule}, s)}, {"param_error", param_error({row.rule}, s)}};
        break;
      }
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.rounds_used = static_cast<Index>(env.rounds());
  row.samples_used = static_cast<Index>(env.samples_drawn());
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return row;
}

void check_config(const ExperimentConfig& cfg, const ScenarioSpec& s) {
  if (cfg.replications < 1) throw InvalidInput("replications must be at least 1");
  if (cfg.algorithm == Algorithm::kEvaluate || cfg.algorithm == Algorithm::kDecompose) {
    if (!cfg.rule) throw InvalidInput(to_string(cfg.algorithm) + " needs a rule (--rule)");
    check_rule({*cfg.rule}, s.visible_mask);
  }
  if (cfg.algorithm == Algorithm::kEvaluate && cfg.eval_samples < 1) throw InvalidInput("evaluate needs n >= 1");
  if (cfg.algorithm == Algorithm::kDecompose && !cfg.oracle) {
    throw InvalidInput("decompose reads ground truth; run it with --oracle");
  }
  if (cfg.algorithm == Algorithm::kSweep && cfg.alphas.size() < 2) {
    throw InvalidInput("sweep needs at least two alpha values");
  }
  for (double a : cfg.alphas) {
    if (!(a >= 0.0)) throw InvalidInput("alpha values must be >= 0");
  }
}

std::map<std::string, double> field_map(const ResultRow& row) {
  std::map<std::string, double> m;
  for (const auto& f : row.estimates) m[f.name] = f.value;
  for (const auto& f : row.oracle) m[f.name] = f.value;
  return m;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kAlg1: return "alg1";
    case Algorithm::kMinRisk: return "minrisk";
    case Algorithm::kAlg3: return "alg3";
    case Algorithm::kEvaluate: return "evaluate";
    case Algorithm::kDecompose: return "decompose";
    case Algorithm::kSweep: return "sweep";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  for (auto a : {Algorithm::kAlg1, Algorithm::kMinRisk, Algorithm::kAlg3, Algorithm::kEvaluate, Algorithm::kDecompose,
                 Algorithm::kSweep}) {
    if (to_string(a) == name) return a;
  }
  throw InvalidInput("unknown algorithm '" + name + "'");
}

std::string to_string(OutputFormat format) { return format == OutputFormat::kCsv ? "csv" : "json"; }

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw InvalidInput("unknown output format '" + name + "'");
}

std::vector<std::string> result_columns(Algorithm algorithm, Index dim_total, bool oracle) {
  std::vector<std::string> cols = kPrefix;
  for (Index i = 0; i < dim_total; ++i) cols.push_back("w" + std::to_string(i));
  const Schema schema = schema_for(algorithm);
  cols.insert(cols.end(), schema.estimates.begin(), schema.estimates.end());
  if (oracle) cols.insert(cols.end(), schema.oracle.begin(), schema.oracle.end());
  cols.insert(cols.end(), kSuffix.begin(), kSuffix.end());
  return cols;
}

const std::vector<std::string>& oracle_column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> all;
    for (auto a : {Algorithm::kAlg1, Algorithm::kMinRisk, Algorithm::kAlg3, Algorithm::kEvaluate,
                   Algorithm::kDecompose, Algorithm::kSweep}) {
      for (const auto& n : schema_for(a).oracle) {
        if (std::find(all.begin(), all.end(), n) == all.end()) all.push_back(n);
      }
    }
    return all;
  }();
  return names;
}

std::uint64_t replication_seed(std::uint64_t master, Index replication) {
  return derive_seed(master, static_cast<std::uint64_t>(replication), "replication");
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  const ScenarioSpec s = load_scenario(cfg.scenario);
  check_config(cfg, s);
  if (cfg.algorithm == Algorithm::kSweep) return sweep_tradeoff(s, cfg.alphas, cfg);

  std::vector<ResultRow> rows(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, cfg.threads,
               [&](Index r) { rows[static_cast<std::size_t>(r)] = run_one(s, cfg, r, std::nullopt); });
  return rows;
}

std::vector<ResultRow> sweep_tradeoff(const ScenarioSpec& scenario, const std::vector<double>& alphas,
                                      const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.algorithm = Algorithm::kSweep;
  c.alphas = alphas;
  check_config(c, scenario);

  const auto per_rep = static_cast<Index>(alphas.size());
  std::vector<ResultRow> rows(static_cast<std::size_t>(c.replications * per_rep));
  parallel_for(c.replications * per_rep, c.threads, [&](Index k) {
    const Index r = k / per_rep;
    const double alpha = alphas[static_cast<std::size_t>(k % per_rep)];
    rows[static_cast<std::size_t>(k)] = run_one(scenario, c, r, alpha);
  });
  return rows;
}

void write_rows(std::ostream& out, const std::vector<ResultRow>& rows, const ExperimentConfig& cfg, Index dim_total) {
  const std::vector<std::string> cols = result_columns(cfg.algorithm, dim_total, cfg.oracle);
  if (cfg.format == OutputFormat::kCsv) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
  }
  ordered_json all = ordered_json::array();
  for (const auto& row : rows) {
    const auto fields = field_map(row);
    ordered_json obj;
    std::vector<std::string> cells;
    for (const auto& col : cols) {
      std::string cell;
      if (col == "seed") {
        cell = std::to_string(row.seed);
        obj[col] = row.seed;
      } else if (col == "replication") {
        cell = std::to_string(row.replication);
        obj[col] = row.replication;
      } else if (col == "algorithm") {
        cell = row.algorithm;
        obj[col] = row.algorithm;
      } else if (col == "rule_norm") {
        cell = format_double(row.rule.norm());
        obj[col] = row.rule.norm();
      } else if (col == "rounds_used") {
        cell = std::to_string(row.rounds_used);
        obj[col] = row.rounds_used;
      } else if (col == "samples_used") {
        cell = std::to_string(row.samples_used);
        obj[col] = row.samples_used;
      } else if (col == "error") {
        cell = csv_escape(row.error);
        obj[col] = row.error;
      } else if (col.size() > 1 && col[0] == 'w' && std::isdigit(static_cast<unsigned char>(col[1]))) {
        const Index i = std::stol(col.substr(1));
        const double v = i < row.rule.size() ? row.rule(i) : 0.0;
        cell = format_double(v);
        obj[col] = v;
      } else if (auto it = fields.find(col); it != fields.end()) {
        cell = format_double(it->second);
        obj[col] = it->second;
      } else {
        obj[col] = nullptr;
      }
      cells.push_back(cell);
    }
    if (cfg.format == OutputFormat::kCsv) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << "\n";
    } else {
      if (!row.details_json.empty()) obj["details"] = ordered_json::parse(row.details_json);
      all.push_back(obj);
    }
  }
  if (cfg.format == OutputFormat::kJson) out << all.dump(2) << "\n";
}

void write_trace_csv(std::ostream& out, const std::vector<ResultRow>& rows, const ScenarioSpec* oracle_scenario) {
  out << "replication,alpha,query_index,role,branch,oracle_value,objective";
  if (oracle_scenario) out << ",exact_risk";
  out << "\n";
  for (const auto& row : rows) {
    double alpha = 0.0;
    for (const auto& f : row.estimates)
      if (f.name == "alpha") alpha = f.value;
    for (const auto& e : row.trace) {
      out << row.replication << "," << format_double(alpha) << "," << e.query_index << "," << e.role << ","
          << to_string(e.query.branch) << "," << format_double(e.query.value) << "," << format_double(e.objective);
      if (oracle_scenario) out << "," << format_double(risk_exact(e.query.rule, *oracle_scenario));
      out << "\n";
    }
  }
}

std::string manifest_json(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
  ordered_json m;
  m["schema_version"] = kScenarioSchemaVersion;
  m["library_version"] = STRATEGIC_VERSION;
  ordered_json c;
  c["scenario"] = cfg.scenario;
  c["algorithm"] = to_string(cfg.algorithm);
  c["seed"] = cfg.seed;
  c["replications"] = cfg.replications;
  c["output_path"] = cfg.output_path;
  c["format"] = to_string(cfg.format);
  c["oracle"] = cfg.oracle;
  c["threads"] = cfg.threads;
  c["seed_split"] = "derive_seed(master, replication, \"replication\")";
  switch (cfg.algorithm) {
    case Algorithm::kAlg1:
      c["alg1"] = {{"epsilon", cfg.alg1.epsilon},
                   {"lambda_max", cfg.alg1.lambda_max},
                   {"sample_multiplier", cfg.alg1.sample_multiplier},
                   {"samples_per_round", cfg.alg1.samples_per_round ? ordered_json(*cfg.alg1.samples_per_round)
                                                                    : ordered_json(nullptr)}};
      break;
    case Algorithm::kMinRisk:
    case Algorithm::kSweep:
      c["minrisk"] = {{"alpha", cfg.zo.alpha},
                      {"alphas", cfg.alphas},
                      {"budget_queries", cfg.zo.budget_queries},
                      {"samples_per_query", cfg.zo.samples_per_query},
                      {"initial_step", cfg.zo.initial_step},
                      {"step_decay", cfg.zo.step_decay},
                      {"smoothing_radius", cfg.zo.smoothing_radius},
                      {"gradient_clip", cfg.zo.gradient_clip},
                      {"domain_radius", cfg.zo.domain_radius},
                      {"init_samples", cfg.zo.init_samples},
                      {"reuse_zero_pool", cfg.zo.reuse_zero_pool},
                      {"eval_every", cfg.zo.eval_every}};
      break;
    case Algorithm::kAlg3: {
      auto opt = [](const std::optional<Index>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
      c["alg3"] = {{"epsilon", cfg.alg3.epsilon},
                   {"n1", opt(cfg.alg3.n1)},
                   {"n2", opt(cfg.alg3.n2)},
                   {"n3", opt(cfg.alg3.n3)},
                   {"sample_multiplier", cfg.alg3.sample_multiplier},
                   {"k1_bound", cfg.alg3.k1_bound},
                   {"k2_bound", cfg.alg3.k2_bound},
                   {"kappa_min_bound", cfg.alg3.kappa_min_bound},
                   {"domain_radius", cfg.alg3.domain_radius},
                   {"design_iters", cfg.alg3.design_iters},
                   {"use_design", cfg.alg3.use_design}};
      break;
    }
    case Algorithm::kEvaluate:
    case Algorithm::kDecompose:
      c["rule"] = cfg.rule ? ordered_json(std::vector<double>(cfg.rule->begin(), cfg.rule->end()))
                           : ordered_json(nullptr);
      c["eval_samples"] = cfg.eval_samples;
      break;
  }
  m["config"] = c;
  ordered_json timings = ordered_json::array();
  for (const auto& row : rows) timings.push_back({{"replication", row.replication}, {"wall_time", row.wall_time}});
  m["wall_time"] = timings;
  return m.dump(2) + "\n";
}

}  // namespace strategic
