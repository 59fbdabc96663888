// strategic-lab: run learning algorithms against simulated strategic agents.

#include "strategic/experiment.hpp"
#include "strategic/scenario_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw strategic::InvalidInput(std::string("bad number '") + item + "' in " + what);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace strategic;

  CLI::App app{"Simulate strategic agents and run decision-rule learning algorithms."};
  app.set_version_flag("--version", std::string(STRATEGIC_VERSION));

  std::string algorithm;
  ExperimentConfig cfg;
  std::string format = "csv";
  std::string rule_text, alphas_text;
  bool print_scenario = false;

  app.add_option("algorithm", algorithm, "alg1 | minrisk | alg3 | evaluate | decompose | sweep")->required();
  app.add_option("--scenario", cfg.scenario, "Builtin scenario name or path to a YAML scenario")->required();
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--reps", cfg.replications, "Number of replications")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.output_path, "Output file (stdout when omitted)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--oracle", cfg.oracle, "Add ground-truth columns");
  app.add_option("--parallel", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--print-scenario", print_scenario, "Print the resolved scenario as YAML and exit");

  double epsilon = 0.1;
  app.add_option("--epsilon", epsilon, "Target accuracy (alg1, alg3)")->check(CLI::PositiveNumber);
  app.add_option("--lambda-max", cfg.alg1.lambda_max, "Bound on the largest eigenvalue of the second moment (alg1)")
      ->check(CLI::PositiveNumber);
  std::optional<Index> per_round;
  app.add_option("--samples-per-round", per_round, "Override samples per round (alg1)")->check(CLI::PositiveNumber);

  app.add_option("--alpha", cfg.zo.alpha, "Weight on the mean outcome (minrisk)")->check(CLI::NonNegativeNumber);
  app.add_option("--alphas", alphas_text, "Comma-separated alpha values (sweep)");
  app.add_option("--budget", cfg.zo.budget_queries, "Oracle query budget (minrisk, sweep)")->check(CLI::PositiveNumber);
  app.add_option("--samples-per-query", cfg.zo.samples_per_query, "Samples per oracle query (minrisk, sweep)")
      ->check(CLI::Range(2, 100'000'000));
  app.add_option("--step", cfg.zo.initial_step, "Initial step size (minrisk, sweep)")->check(CLI::PositiveNumber);
  app.add_option("--radius", cfg.zo.domain_radius, "Feasible ball radius (minrisk, sweep)")
      ->check(CLI::PositiveNumber);
  app.add_option("--trace", cfg.trace_path, "Per-query trace CSV (minrisk, sweep)");

  bool no_design = false;
  app.add_flag("--no-design", no_design, "Skip the design stage and use the zero rule (alg3)");
  app.add_option("--n1", cfg.alg3.n1, "Stage 1 samples (alg3)")->check(CLI::Range(2, 100'000'000));
  app.add_option("--n2", cfg.alg3.n2, "Samples per probe round (alg3)")->check(CLI::Range(2, 100'000'000));
  app.add_option("--n3", cfg.alg3.n3, "Final-stage samples (alg3)")->check(CLI::Range(2, 100'000'000));
  app.add_option("--k1", cfg.alg3.k1_bound, "Bound on the largest eigenvalue of GᵀG (alg3)")
      ->check(CLI::PositiveNumber);
  app.add_option("--k2", cfg.alg3.k2_bound, "Bound on the squared norm of the second moment (alg3)")
      ->check(CLI::PositiveNumber);
  app.add_option("--kappa-bound", cfg.alg3.kappa_min_bound, "Lower bound on the smallest eigenvalue (alg3)")
      ->check(CLI::PositiveNumber);
  app.add_option("--design-radius", cfg.alg3.domain_radius, "Radius of the design search (alg3)")
      ->check(CLI::PositiveNumber);

  app.add_option("--rule", rule_text, "Comma-separated rule weights (evaluate, decompose)");
  app.add_option("--n", cfg.eval_samples, "Samples drawn (evaluate)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (print_scenario) {
      std::cout << dump_scenario(load_scenario(cfg.scenario));
      return 0;
    }
    cfg.algorithm = algorithm_from_string(algorithm);
    cfg.format = output_format_from_string(format);
    cfg.alg1.epsilon = epsilon;
    cfg.alg1.samples_per_round = per_round;
    cfg.alg3.epsilon = epsilon;
    cfg.alg3.use_design = !no_design;
    if (!rule_text.empty()) {
      const auto w = parse_list(rule_text, "--rule");
      cfg.rule = Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size()));
    }
    if (!alphas_text.empty()) cfg.alphas = parse_list(alphas_text, "--alphas");
    if (cfg.algorithm == Algorithm::kSweep && cfg.alphas.empty()) cfg.alphas = {0.0, 0.5, 1.0, 2.0};

    const ScenarioSpec scenario = load_scenario(cfg.scenario);
    const std::vector<ResultRow> rows = run_experiment(cfg);

    if (cfg.output_path.empty()) {
      write_rows(std::cout, rows, cfg, scenario.dim_total);
    } else {
      std::ofstream out(cfg.output_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + cfg.output_path);
      write_rows(out, rows, cfg, scenario.dim_total);
      std::ofstream manifest(cfg.output_path + ".manifest.json", std::ios::binary);
      manifest << manifest_json(cfg, rows);
    }
    if (!cfg.trace_path.empty()) {
      std::ofstream trace(cfg.trace_path, std::ios::binary);
      if (!trace) throw std::runtime_error("cannot write " + cfg.trace_path);
      write_trace_csv(trace, rows, cfg.oracle ? &scenario : nullptr);
    }

    int failed = 0;
    for (const auto& row : rows) {
      if (!row.error.empty()) {
        std::cerr << "replication " << row.replication << ": " << row.error << "\n";
        ++failed;
      }
    }
    return failed ? kExitRuntime : 0;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
