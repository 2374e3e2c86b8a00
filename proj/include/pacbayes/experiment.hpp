#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pacbayes/linreg.hpp"

namespace pacbayes {

/// Full specification of an experiment run. The defaults reproduce the
/// reference setup: d = 10, m in {100,200,300,400}, 10 repetitions,
/// delta = 0.05, r = 1, r_Q = 0.05, x-ball radius 0.1, 10000 test samples.
struct ExperimentConfig {
  int d = 10;
  std::vector<int> m_values{100, 200, 300, 400};
  int repetitions = 10;
  double delta = 0.05;
  double sigma_p = 1e-2;
  double sigma_q = 1e-3;
  Objective objective = Objective::KLPB;
  double r = 1.0;
  double r_q = 0.05;
  double x_radius = 0.1;
  int n_test = 10000;
  std::uint64_t master_seed = 1;
  AdamParams adam;
  int max_epochs = 2000;
  double tol = 1e-8;
  int max_batch_size = 256;
  int threads = 0;  // 0 = all available; 1 = serial reference path

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct ColumnStats {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95% t-interval half width
};

struct ExperimentRow {
  int n_samples = 0;
  ColumnStats train_risk;
  ColumnStats test_risk;
  ColumnStats uc_bound;
  ColumnStats wpb_bound;
  std::optional<ColumnStats> klpb_bound;  // absent => "undefined"
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ExperimentRow> rows;
  std::string config_hash;
  std::string version;
};

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
double student_t_quantile_975(int degrees_of_freedom);

/// FNV-1a hash of the canonical config JSON, as a hex string.
std::string config_hash(const ExperimentConfig& config);

/// Runs the experiment: one (task, dataset, training, evaluation) per
/// (m, repetition) cell with a per-cell derived seed, aggregated into
/// per-m means and 95% confidence intervals. Cells run in parallel.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV table, header
///   n_samples,train_risk,train_ci,test_risk,test_ci,uc_bound,uc_ci,
///   wpb_bound,wpb_ci,klpb_bound,klpb_ci
/// with values rounded to 4 decimals and the literal "undefined" where the
/// KL bound does not exist. LF line endings.
std::string results_csv(const ExperimentResult& result);

/// Result document embedding the full config and run metadata.
nlohmann::json results_json(const ExperimentResult& result);

/// Line chart of all five columns against m (deterministic output).
std::string results_svg(const ExperimentResult& result);

/// Writes results.csv, results.json and plot.svg into out_dir.
void write_experiment_outputs(const ExperimentResult& result,
                              const std::filesystem::path& out_dir);

}  // namespace pacbayes
