#include "pacbayes/experiment.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pacbayes/bounds.hpp"
#include "pacbayes/divergences.hpp"
#include "pacbayes/errors.hpp"
#include "pacbayes/parallel.hpp"
#include "pacbayes/version.hpp"

namespace pacbayes {

namespace {

Objective objective_from_string(const std::string& name) {
  if (name == "WPB") return Objective::WPB;
  if (name == "KLPB") return Objective::KLPB;
  throw std::invalid_argument("unknown objective '" + name + "' (expected WPB or KLPB)");
}

std::string format4(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", v);
  return buffer;
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{
      {"d", d},
      {"m_values", m_values},
      {"repetitions", repetitions},
      {"delta", delta},
      {"sigma_p", sigma_p},
      {"sigma_q", sigma_q},
      {"objective", to_string(objective)},
      {"r", r},
      {"r_q", r_q},
      {"x_radius", x_radius},
      {"n_test", n_test},
      {"master_seed", master_seed},
      {"optimizer",
       {{"learning_rate", adam.learning_rate},
        {"beta1", adam.beta1},
        {"beta2", adam.beta2},
        {"epsilon", adam.epsilon},
        {"max_epochs", max_epochs},
        {"tol", tol},
        {"max_batch_size", max_batch_size}}},
      {"threads", threads}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  config.d = j.value("d", config.d);
  config.m_values = j.value("m_values", config.m_values);
  config.repetitions = j.value("repetitions", config.repetitions);
  config.delta = j.value("delta", config.delta);
  config.sigma_p = j.value("sigma_p", config.sigma_p);
  config.sigma_q = j.value("sigma_q", config.sigma_q);
  if (j.contains("objective")) {
    config.objective = objective_from_string(j.at("objective").get<std::string>());
  }
  config.r = j.value("r", config.r);
  config.r_q = j.value("r_q", config.r_q);
  config.x_radius = j.value("x_radius", config.x_radius);
  config.n_test = j.value("n_test", config.n_test);
  config.master_seed = j.value("master_seed", config.master_seed);
  if (j.contains("optimizer")) {
    const auto& opt = j.at("optimizer");
    config.adam.learning_rate = opt.value("learning_rate", config.adam.learning_rate);
    config.adam.beta1 = opt.value("beta1", config.adam.beta1);
    config.adam.beta2 = opt.value("beta2", config.adam.beta2);
    config.adam.epsilon = opt.value("epsilon", config.adam.epsilon);
    config.max_epochs = opt.value("max_epochs", config.max_epochs);
    config.tol = opt.value("tol", config.tol);
    config.max_batch_size = opt.value("max_batch_size", config.max_batch_size);
  }
  config.threads = j.value("threads", config.threads);

  if (config.d < 1) throw std::invalid_argument("config: d must be >= 1");
  if (config.m_values.empty()) throw std::invalid_argument("config: m_values must be non-empty");
  for (int m : config.m_values) {
    if (m < 2) throw std::invalid_argument("config: every m must be >= 2");
  }
  if (config.repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument("config: delta must lie in (0,1)");
  }
  if (config.sigma_p < 0.0 || config.sigma_q < 0.0) {
    throw std::invalid_argument("config: sigmas must be >= 0");
  }
  if (!(config.r > 0.0) || !(config.r_q > 0.0) || !(config.x_radius > 0.0)) {
    throw std::invalid_argument("config: radii must be > 0");
  }
  if (config.n_test < 1) throw std::invalid_argument("config: n_test must be >= 1");
  return config;
}

double student_t_quantile_975(int degrees_of_freedom) {
  if (degrees_of_freedom < 1) throw std::invalid_argument("t quantile: df must be >= 1");
  boost::math::students_t dist(static_cast<double>(degrees_of_freedom));
  return boost::math::quantile(dist, 0.975);
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string dump = config.to_json().dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

namespace {

struct CellOutcome {
  double train = 0.0;
  double test = 0.0;
  double uc = 0.0;
  double wpb = 0.0;
  std::optional<double> klpb;
};

CellOutcome run_cell(const ExperimentConfig& config, int m, RandomSource rng) {
  RegressionTask task = generate_task(rng, config.d, config.x_radius);
  const Dataset data = sample_dataset(rng, task, m);

  TrainConfig train_config;
  train_config.objective = config.objective;
  train_config.sigma_q = config.sigma_q;
  train_config.sigma_p = config.sigma_p;
  train_config.delta = config.delta;
  train_config.r = config.r;
  train_config.r_q = config.r_q;
  train_config.adam = config.adam;
  train_config.max_epochs = config.max_epochs;
  train_config.tol = config.tol;
  train_config.max_batch_size = config.max_batch_size;

  const PosteriorParams post = train_posterior(rng, data, train_config);

  CellOutcome outcome;
  outcome.train = empirical_risk_closed_form(data, post);
  outcome.test = test_risk_monte_carlo(rng, task, post, config.n_test);
  outcome.uc = outcome.train + uc_linreg(m, config.delta, config.d);

  const ProjectedGaussianMeasure q(GaussianMeasure(post.mu_q, post.sigma_q), config.r);
  const ProjectedGaussianMeasure p(GaussianMeasure(Vec(data.dim(), 0.0), config.sigma_p),
                                   config.r);
  const DivergenceValue w = w1_projected_gaussian_upper(q, p);
  outcome.wpb =
      wpb_linreg(outcome.train, w, m, config.delta, config.d, config.r).bound_value;
  try {
    outcome.klpb = klpb_linreg(outcome.train, GaussianMeasure(post.mu_q, post.sigma_q),
                               GaussianMeasure(Vec(data.dim(), 0.0), config.sigma_p), m,
                               config.delta)
                       .bound_value;
  } catch (const UndefinedValueError&) {
    outcome.klpb.reset();
  }
  return outcome;
}

ColumnStats aggregate(const std::vector<double>& values, double t_quantile) {
  RunningStats stats;
  for (double v : values) stats.add(v);
  ColumnStats column;
  column.mean = stats.mean();
  column.ci_half_width =
      values.size() > 1
          ? t_quantile * stats.stddev() / std::sqrt(static_cast<double>(values.size()))
          : 0.0;
  return column;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const int reps = config.repetitions;
  const auto num_cells =
      static_cast<std::int64_t>(config.m_values.size()) * static_cast<std::int64_t>(reps);
  std::vector<CellOutcome> cells(static_cast<std::size_t>(num_cells));
  const RandomSource master(config.master_seed);

  parallel_for(num_cells, config.threads, [&](std::int64_t cell) {
    const int m_index = static_cast<int>(cell / reps);
    cells[static_cast<std::size_t>(cell)] =
        run_cell(config, config.m_values[static_cast<std::size_t>(m_index)],
                 master.derive(static_cast<std::uint64_t>(cell)));
  });

  ExperimentResult result;
  result.config = config;
  result.config_hash = config_hash(config);
  result.version = kVersion;
  const double t_quantile = reps > 1 ? student_t_quantile_975(reps - 1) : 0.0;

  for (std::size_t m_index = 0; m_index < config.m_values.size(); ++m_index) {
    std::vector<double> train, test, uc, wpb, klpb;
    bool klpb_defined = true;
    for (int rep = 0; rep < reps; ++rep) {
      const CellOutcome& cell = cells[m_index * static_cast<std::size_t>(reps) +
                                      static_cast<std::size_t>(rep)];
      train.push_back(cell.train);
      test.push_back(cell.test);
      uc.push_back(cell.uc);
      wpb.push_back(cell.wpb);
      if (cell.klpb) {
        klpb.push_back(*cell.klpb);
      } else {
        klpb_defined = false;
      }
    }
    ExperimentRow row;
    row.n_samples = config.m_values[m_index];
    row.train_risk = aggregate(train, t_quantile);
    row.test_risk = aggregate(test, t_quantile);
    row.uc_bound = aggregate(uc, t_quantile);
    row.wpb_bound = aggregate(wpb, t_quantile);
    if (klpb_defined) row.klpb_bound = aggregate(klpb, t_quantile);
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string results_csv(const ExperimentResult& result) {
  std::string csv =
      "n_samples,train_risk,train_ci,test_risk,test_ci,uc_bound,uc_ci,"
      "wpb_bound,wpb_ci,klpb_bound,klpb_ci\n";
  for (const ExperimentRow& row : result.rows) {
    csv += std::to_string(row.n_samples);
    for (const ColumnStats* column :
         {&row.train_risk, &row.test_risk, &row.uc_bound, &row.wpb_bound}) {
      csv += "," + format4(column->mean) + "," + format4(column->ci_half_width);
    }
    if (row.klpb_bound) {
      csv += "," + format4(row.klpb_bound->mean) + "," + format4(row.klpb_bound->ci_half_width);
    } else {
      csv += ",undefined,undefined";
    }
    csv += "\n";
  }
  return csv;
}

nlohmann::json results_json(const ExperimentResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ExperimentRow& row : result.rows) {
    nlohmann::json j{{"n_samples", row.n_samples}};
    auto emit = [&j](const char* name, const ColumnStats& column) {
      j[name] = {{"mean", column.mean}, {"ci", column.ci_half_width}};
    };
    emit("train_risk", row.train_risk);
    emit("test_risk", row.test_risk);
    emit("uc_bound", row.uc_bound);
    emit("wpb_bound", row.wpb_bound);
    if (row.klpb_bound) {
      emit("klpb_bound", *row.klpb_bound);
    } else {
      j["klpb_bound"] = "undefined";
    }
    rows.push_back(std::move(j));
  }
  return nlohmann::json{
      {"version", result.version},
      {"config", result.config.to_json()},
      {"config_hash", result.config_hash},
      {"metadata",
       {{"seed", result.config.master_seed},
        {"rng_algorithm", std::string(RandomSource::algorithm())},
        {"ci_method", "student-t, df = repetitions - 1"},
        {"mu_q_init", "zero"},
        {"optimizer",
         {{"learning_rate", result.config.adam.learning_rate},
          {"beta1", result.config.adam.beta1},
          {"beta2", result.config.adam.beta2},
          {"epsilon", result.config.adam.epsilon},
          {"max_epochs", result.config.max_epochs},
          {"tol", result.config.tol},
          {"max_batch_size", result.config.max_batch_size}}}}},
      {"rows", rows}};
}

void write_experiment_outputs(const ExperimentResult& result,
                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  auto write_file = [&](const char* name, const std::string& contents) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + (out_dir / name).string());
    }
    out << contents;
    if (!out.good()) {
      throw std::runtime_error("failed writing " + (out_dir / name).string());
    }
  };
  write_file("results.csv", results_csv(result));
  write_file("results.json", results_json(result).dump(2) + "\n");
  write_file("plot.svg", results_svg(result));
}

}  // namespace pacbayes
