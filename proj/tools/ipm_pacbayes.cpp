// ipm-pacbayes: command-line front end for the PAC-Bayes bound library.
//
// Subcommands:
//   divergence  evaluate a divergence between two measures, JSON to stdout
//   bound       evaluate a bound formula, JSON BoundReport to stdout
//   experiment  run the regression experiment, write results.csv/.json/plot.svg
//   verify      run an oracle/validity suite, JSON report, exit 0 iff pass
//
// Exit codes: 0 success/pass, 1 usage or I/O error, 2 mathematically
// undefined result (serialized as the string "undefined").

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pacbayes/bounds.hpp"
#include "pacbayes/divergences.hpp"
#include "pacbayes/errors.hpp"
#include "pacbayes/experiment.hpp"
#include "pacbayes/parallel.hpp"
#include "pacbayes/verify.hpp"
#include "pacbayes/version.hpp"

namespace {

using nlohmann::json;
using namespace pacbayes;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUndefined = 2;

// "1,2,3" inline or "@path" for a whitespace/comma separated file.
Vec parse_vector(const std::string& text) {
  std::string payload = text;
  if (!text.empty() && text.front() == '@') {
    std::ifstream in(text.substr(1));
    if (!in) throw std::runtime_error("cannot open vector file " + text.substr(1));
    std::stringstream buffer;
    buffer << in.rdbuf();
    payload = buffer.str();
  }
  for (char& c : payload) {
    if (c == ',' || c == ';' || c == '\n' || c == '\t') c = ' ';
  }
  Vec values;
  std::istringstream stream(payload);
  double v;
  while (stream >> v) values.push_back(v);
  if (values.empty()) throw std::runtime_error("empty vector operand '" + text + "'");
  return values;
}

// Rows separated by ';' (or lines in an @file), entries by commas/spaces.
std::vector<Vec> parse_matrix(const std::string& text) {
  std::string payload = text;
  if (!text.empty() && text.front() == '@') {
    std::ifstream in(text.substr(1));
    if (!in) throw std::runtime_error("cannot open matrix file " + text.substr(1));
    std::stringstream buffer;
    buffer << in.rdbuf();
    payload = buffer.str();
    for (char& c : payload) {
      if (c == '\n') c = ';';
    }
  }
  std::vector<Vec> rows;
  std::stringstream stream(payload);
  std::string row_text;
  while (std::getline(stream, row_text, ';')) {
    if (row_text.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_vector(row_text));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix operand");
  return rows;
}

json divergence_to_json(const DivergenceValue& value) {
  return json{{"kind", to_string(value.kind)}, {"value", value.value}};
}

json report_to_json(const BoundReport& report) {
  json inputs{{"m", report.inputs.m}, {"delta", report.inputs.delta}};
  if (report.inputs.divergence) inputs["divergence"] = divergence_to_json(*report.inputs.divergence);
  if (report.inputs.uc) inputs["uc"] = *report.inputs.uc;
  if (report.inputs.ucg) inputs["ucg"] = *report.inputs.ucg;
  for (const auto& [key, value] : report.inputs.extra) inputs[key] = value;
  json j{{"complexity", report.complexity},
         {"bound_value", report.bound_value},
         {"inputs", inputs}};
  if (report.empirical_risk) j["empirical_risk"] = *report.empirical_risk;
  return j;
}

struct DivergenceArgs {
  std::string kind;
  std::string q_text, p_text, dist_text;
  std::string mu_q_text, mu_p_text;
  double sigma_q = 0.0, sigma_p = 0.0;
  double radius = 1.0;
};

int run_divergence(const DivergenceArgs& args) {
  json output;
  try {
    DivergenceValue value{0.0, DivergenceKind::TV};
    json inputs;
    if (args.kind == "kl-gaussian" || args.kind == "w2-gaussian" ||
        args.kind == "w1-proj-gauss") {
      const GaussianMeasure q(parse_vector(args.mu_q_text), args.sigma_q);
      const GaussianMeasure p(parse_vector(args.mu_p_text), args.sigma_p);
      inputs = {{"mu_q", q.mean}, {"sigma_q", q.sigma},
                {"mu_p", p.mean}, {"sigma_p", p.sigma}};
      if (args.kind == "kl-gaussian") {
        value = kl_gaussian_isotropic(q, p);
      } else if (args.kind == "w2-gaussian") {
        value = w2_gaussian(q, p);
      } else {
        inputs["radius"] = args.radius;
        value = w1_projected_gaussian_upper(ProjectedGaussianMeasure(q, args.radius),
                                            ProjectedGaussianMeasure(p, args.radius));
      }
    } else if (args.kind == "tv" || args.kind == "w1-finite") {
      const DiscreteMeasure q(parse_vector(args.q_text));
      const DiscreteMeasure p(parse_vector(args.p_text));
      inputs = {{"q", q.weights}, {"p", p.weights}};
      if (args.kind == "tv") {
        value = tv_discrete(q, p);
      } else {
        const auto rows = parse_matrix(args.dist_text);
        std::vector<double> flat;
        for (const Vec& row : rows) {
          if (row.size() != rows.size()) {
            throw std::runtime_error("distance matrix must be square");
          }
          flat.insert(flat.end(), row.begin(), row.end());
        }
        const FiniteMetricSpace space(rows.size(), std::move(flat));
        inputs["dist_rows"] = static_cast<int>(rows.size());
        value = w1_discrete_exact(q, p, space);
      }
    } else {
      std::cerr << "unknown divergence kind '" << args.kind << "'\n";
      return kExitUsage;
    }
    output = divergence_to_json(value);
    output["inputs"] = inputs;
  } catch (const UndefinedValueError& e) {
    std::cout << json{{"kind", args.kind}, {"value", "undefined"}}.dump(2) << "\n";
    std::cerr << e.what() << "\n";
    return kExitUndefined;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cout << output.dump(2) << "\n";
  return kExitOk;
}

struct BoundArgs {
  std::string name;
  int m = 100;
  double delta = 0.05;
  std::optional<double> kl, gamma, uc, ucg, tv, w1, c, g, emp_risk, jhat, w, r;
  std::optional<int> vc, class_size, d;
};

int run_bound(const BoundArgs& args, const std::string& mu_q_text,
              const std::string& mu_p_text, std::optional<double> sigma_q,
              std::optional<double> sigma_p) {
  auto need = [&](const auto& opt, const char* flag) {
    if (!opt) {
      throw std::runtime_error(std::string("bound ") + args.name + " requires " + flag);
    }
  };
  try {
    json output;
    if (args.name == "klpb-classic") {
      need(args.kl, "--kl");
      output = report_to_json(
          klpb_classic({*args.kl, DivergenceKind::KL}, args.m, args.delta));
    } else if (args.name == "ipm-template") {
      need(args.gamma, "--gamma");
      output = report_to_json(ipm_pb_template(*args.gamma, args.m, args.delta));
    } else if (args.name == "tvpb-uc") {
      need(args.uc, "--uc");
      need(args.tv, "--tv");
      output = report_to_json(
          tvpb_from_uc(*args.uc, {*args.tv, DivergenceKind::TV}, args.m, args.delta));
    } else if (args.name == "tvpb-vc") {
      need(args.vc, "--vc");
      need(args.tv, "--tv");
      if (!args.c) {
        // The universal constant of the VC uniform-convergence theorem has no
        // explicit value in the literature, so it can never default.
        throw std::runtime_error(
            "bound tvpb-vc requires --c: the VC theorem's universal constant has no "
            "known explicit value and must be chosen by the caller");
      }
      output = report_to_json(tvpb_vc(*args.vc, *args.c, {*args.tv, DivergenceKind::TV},
                                      args.m, args.delta));
    } else if (args.name == "wpb-template") {
      need(args.w1, "--w1");
      const double k = args.uc && args.ucg ? 2.0 * *args.uc * *args.ucg
                                           : (need(args.c, "--k (via --c)"), *args.c);
      output = report_to_json(
          wpb_template(k, {*args.w1, DivergenceKind::W1Exact}, args.m, args.delta));
    } else if (args.name == "wpb-finite") {
      need(args.class_size, "--class-size");
      need(args.g, "--g");
      need(args.w1, "--w1");
      output = report_to_json(wpb_finite(*args.class_size, *args.g,
                                         {*args.w1, DivergenceKind::W1Exact}, args.m,
                                         args.delta));
    } else if (args.name == "wpb-grad-uc") {
      need(args.uc, "--uc");
      need(args.ucg, "--ucg");
      need(args.w1, "--w1");
      output = report_to_json(wpb_grad_uc(*args.uc, *args.ucg,
                                          {*args.w1, DivergenceKind::W1Exact}, args.m,
                                          args.delta));
    } else if (args.name == "seeger-tv-finite") {
      need(args.emp_risk, "--emp-risk");
      need(args.class_size, "--class-size");
      need(args.tv, "--tv");
      output = report_to_json(seeger_tv_finite(*args.emp_risk, *args.class_size,
                                               {*args.tv, DivergenceKind::TV}, args.m,
                                               args.delta));
    } else if (args.name == "uc-linreg") {
      need(args.d, "--d");
      output = json{{"name", "uc-linreg"},
                    {"value", uc_linreg(args.m, args.delta, *args.d)},
                    {"inputs", {{"m", args.m}, {"delta", args.delta}, {"d", *args.d}}}};
    } else if (args.name == "ucg-linreg") {
      need(args.d, "--d");
      need(args.r, "--r");
      output = json{
          {"name", "ucg-linreg"},
          {"value", ucg_linreg(args.m, args.delta, *args.d, *args.r)},
          {"inputs",
           {{"m", args.m}, {"delta", args.delta}, {"d", *args.d}, {"r", *args.r}}}};
    } else if (args.name == "wpb-linreg") {
      need(args.jhat, "--jhat");
      need(args.w, "--w");
      need(args.d, "--d");
      need(args.r, "--r");
      output = report_to_json(wpb_linreg(*args.jhat,
                                         {*args.w, DivergenceKind::W1ProjGaussUpper},
                                         args.m, args.delta, *args.d, *args.r));
    } else if (args.name == "klpb-linreg") {
      need(args.jhat, "--jhat");
      if (mu_q_text.empty() || mu_p_text.empty() || !sigma_q || !sigma_p) {
        throw std::runtime_error(
            "bound klpb-linreg requires --mu-q, --mu-p, --sigma-q, --sigma-p");
      }
      output = report_to_json(klpb_linreg(*args.jhat,
                                          GaussianMeasure(parse_vector(mu_q_text), *sigma_q),
                                          GaussianMeasure(parse_vector(mu_p_text), *sigma_p),
                                          args.m, args.delta));
    } else {
      std::cerr << "unknown bound '" << args.name << "'\n";
      return kExitUsage;
    }
    std::cout << output.dump(2) << "\n";
    return kExitOk;
  } catch (const UndefinedValueError& e) {
    std::cout << json{{"name", args.name}, {"value", "undefined"}}.dump(2) << "\n";
    std::cerr << e.what() << "\n";
    return kExitUndefined;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

json validity_to_json(const char* suite, const verify::ValidityReport& report) {
  return json{{"suite", suite},          {"trials", report.trials},
              {"violations", report.violations}, {"rate", report.rate()},
              {"delta", report.delta},   {"slack", report.slack},
              {"pass", report.pass}};
}

int run_verify(const std::string& suite, int trials, double delta, std::uint64_t seed,
               int threads, int points, int n_mc) {
  const RandomSource rng(seed);
  json output;
  bool pass = false;
  if (suite == "transport") {
    RandomSource gen = rng.derive(1);
    long long violations = 0;
    double max_diff = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t n = 2 + gen.below(3);
      std::vector<double> points_x(n), points_y(n);
      for (std::size_t i = 0; i < n; ++i) {
        points_x[i] = gen.uniform01();
        points_y[i] = gen.uniform01();
      }
      std::vector<double> dist(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double dx = points_x[i] - points_x[j];
          const double dy = points_y[i] - points_y[j];
          dist[i * n + j] = std::sqrt(dx * dx + dy * dy);
        }
      }
      const FiniteMetricSpace space(n, std::move(dist));
      auto random_measure = [&]() {
        Vec w(n);
        double total = 0.0;
        for (double& x : w) {
          x = -std::log(1.0 - gen.uniform01());
          total += x;
        }
        for (double& x : w) x /= total;
        return DiscreteMeasure(w);
      };
      const DiscreteMeasure q = random_measure();
      const DiscreteMeasure p = random_measure();
      const double fast = w1_discrete_exact(q, p, space).value;
      const double oracle = verify::w1_bruteforce_oracle(q, p, space);
      const double diff = std::abs(fast - oracle);
      max_diff = std::max(max_diff, diff);
      if (diff > 1e-8) ++violations;
    }
    pass = violations == 0;
    output = json{{"suite", "transport"}, {"trials", trials},     {"violations", violations},
                  {"max_abs_diff", max_diff}, {"tolerance", 1e-8}, {"pass", pass}};
  } else if (suite == "gradients") {
    const double wpb = verify::gradient_check(rng, Objective::WPB, points);
    const double klpb = verify::gradient_check(rng, Objective::KLPB, points);
    const double empirical = verify::empirical_risk_gradient_check(rng, points);
    pass = wpb <= 1e-5 && klpb <= 1e-5 && empirical <= 1e-7;
    output = json{{"suite", "gradients"},
                  {"points", points},
                  {"max_rel_error_wpb", wpb},
                  {"max_rel_error_klpb", klpb},
                  {"max_rel_error_empirical_risk", empirical},
                  {"tolerance", 1e-5},
                  {"tolerance_empirical_risk", 1e-7},
                  {"pass", pass}};
  } else if (suite == "lipschitz-lemma") {
    const auto scenario = verify::default_finite_class_scenario();
    const auto report =
        verify::lemma_lipschitz_validity(rng, scenario, trials, 50, delta, threads);
    pass = report.pass;
    output = validity_to_json("lipschitz-lemma", report);
  } else if (suite == "validity") {
    const auto scenario = verify::default_finite_class_scenario();
    const auto tvpb = verify::bound_validity_mc(rng, scenario, verify::BoundSelector::TVPB,
                                                trials, 50, delta, threads);
    const auto klpb = verify::bound_validity_mc(
        rng.derive(2), scenario, verify::BoundSelector::KLPBClassic, trials, 50, delta,
        threads);
    pass = tvpb.pass && klpb.pass;
    output = json{{"suite", "validity"},
                  {"tvpb", validity_to_json("tvpb", tvpb)},
                  {"klpb_classic", validity_to_json("klpb-classic", klpb)},
                  {"pass", pass}};
  } else if (suite == "projected-risk") {
    RandomSource gen = rng.derive(3);
    const RegressionTask task = generate_task(gen, 10);
    PosteriorParams post;
    post.mu_q = sample_uniform_ball(gen, 10, 0.05);
    post.r_q = 0.05;

    post.sigma_q = 1e-3;
    const auto narrow = verify::projected_risk_crosscheck(rng, task, post, n_mc, 1.0);
    post.sigma_q = 0.0;
    const auto dirac = verify::projected_risk_crosscheck(rng, task, post, n_mc, 1.0);
    post.sigma_q = 0.5;
    const auto wide = verify::projected_risk_crosscheck(rng, task, post, n_mc, 1.0);
    pass = narrow.diff <= 1e-6 && dirac.diff == 0.0 && wide.diff > 1e-5;
    auto emit = [](const verify::RiskCrosscheck& c) {
      return json{{"closed_form", c.closed_form},
                  {"projected_mc", c.projected_mc},
                  {"diff", c.diff}};
    };
    output = json{{"suite", "projected-risk"},
                  {"n_mc", n_mc},
                  {"narrow_sigma", emit(narrow)},
                  {"dirac", emit(dirac)},
                  {"wide_sigma", emit(wide)},
                  {"pass", pass}};
  } else {
    std::cerr << "unknown verify suite '" << suite << "'\n";
    return kExitUsage;
  }
  std::cout << output.dump(2) << "\n";
  return pass ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC-Bayes bounds with integral probability metrics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config_path;
  app.add_option("--seed", seed, "master seed (overrides config)");
  app.add_option("--out-dir", out_dir, "output directory for experiment files");
  app.add_option("--config", config_path, "experiment config JSON path");
  app.fallthrough();

  // divergence
  auto* div_cmd = app.add_subcommand("divergence", "evaluate a divergence");
  DivergenceArgs div_args;
  div_cmd->add_option("--kind", div_args.kind,
                      "kl-gaussian | tv | w1-finite | w2-gaussian | w1-proj-gauss")
      ->required();
  div_cmd->add_option("--q", div_args.q_text, "weights of Q (inline or @file)");
  div_cmd->add_option("--p", div_args.p_text, "weights of P (inline or @file)");
  div_cmd->add_option("--dist", div_args.dist_text, "distance matrix rows 'a,b;c,d' or @file");
  div_cmd->add_option("--mu-q", div_args.mu_q_text, "mean of Q");
  div_cmd->add_option("--mu-p", div_args.mu_p_text, "mean of P");
  div_cmd->add_option("--sigma-q", div_args.sigma_q, "sigma of Q");
  div_cmd->add_option("--sigma-p", div_args.sigma_p, "sigma of P");
  div_cmd->add_option("--radius", div_args.radius, "projection ball radius");

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "evaluate a bound formula");
  BoundArgs bound_args;
  std::string bound_mu_q, bound_mu_p;
  std::optional<double> bound_sigma_q, bound_sigma_p;
  bound_cmd->add_option("name", bound_args.name, "bound name")->required();
  bound_cmd->add_option("--m", bound_args.m, "sample count");
  bound_cmd->add_option("--delta", bound_args.delta, "confidence parameter");
  bound_cmd->add_option("--kl", bound_args.kl, "KL divergence value");
  bound_cmd->add_option("--gamma", bound_args.gamma, "IPM value");
  bound_cmd->add_option("--uc", bound_args.uc, "uniform convergence bound value");
  bound_cmd->add_option("--ucg", bound_args.ucg, "loss-gradient UC bound value");
  bound_cmd->add_option("--tv", bound_args.tv, "total variation value");
  bound_cmd->add_option("--w1", bound_args.w1, "Wasserstein-1 value");
  bound_cmd->add_option("--c", bound_args.c, "constant (tvpb-vc / wpb-template K)");
  bound_cmd->add_option("--vc", bound_args.vc, "VC dimension");
  bound_cmd->add_option("--class-size", bound_args.class_size, "|H|");
  bound_cmd->add_option("--g", bound_args.g, "loss Lipschitz constant");
  bound_cmd->add_option("--emp-risk", bound_args.emp_risk, "empirical risk");
  bound_cmd->add_option("--jhat", bound_args.jhat, "closed-form empirical risk");
  bound_cmd->add_option("--w", bound_args.w, "W_bound value");
  bound_cmd->add_option("--d", bound_args.d, "dimension");
  bound_cmd->add_option("--r", bound_args.r, "ball radius");
  bound_cmd->add_option("--mu-q", bound_mu_q, "posterior mean");
  bound_cmd->add_option("--mu-p", bound_mu_p, "prior mean");
  bound_cmd->add_option("--sigma-q", bound_sigma_q, "posterior sigma");
  bound_cmd->add_option("--sigma-p", bound_sigma_p, "prior sigma");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run the regression experiment");
  std::optional<double> exp_sigma_p, exp_sigma_q;
  std::optional<int> exp_reps, exp_n_test, exp_threads;
  std::optional<std::string> exp_objective;
  std::vector<int> exp_m_values;
  exp_cmd->add_option("--sigma-p", exp_sigma_p, "prior sigma");
  exp_cmd->add_option("--sigma-q", exp_sigma_q, "posterior sigma");
  exp_cmd->add_option("--objective", exp_objective, "WPB or KLPB");
  exp_cmd->add_option("--repetitions", exp_reps, "independent repetitions");
  exp_cmd->add_option("--n-test", exp_n_test, "test set size");
  exp_cmd->add_option("--threads", exp_threads, "worker threads (1 = serial)");
  exp_cmd->add_option("--m-values", exp_m_values, "sample counts")->delimiter(',');

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run an oracle/validity suite");
  std::string suite;
  int trials = 0;  // 0 = suite default
  double verify_delta = 0.05;
  int verify_threads = 0;
  int verify_points = 100;
  int verify_n_mc = 200000;
  verify_cmd
      ->add_option("suite", suite,
                   "transport | gradients | lipschitz-lemma | validity | projected-risk")
      ->required();
  verify_cmd->add_option("--trials", trials, "number of Monte-Carlo trials");
  verify_cmd->add_option("--delta", verify_delta, "confidence parameter");
  verify_cmd->add_option("--threads", verify_threads, "worker threads (1 = serial)");
  verify_cmd->add_option("--points", verify_points, "points for gradient checks");
  verify_cmd->add_option("--n-mc", verify_n_mc, "samples for projected-risk Monte Carlo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (div_cmd->parsed()) return run_divergence(div_args);
    if (bound_cmd->parsed()) {
      return run_bound(bound_args, bound_mu_q, bound_mu_p, bound_sigma_q, bound_sigma_p);
    }
    if (exp_cmd->parsed()) {
      ExperimentConfig config;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
          std::cerr << "cannot open config " << config_path << "\n";
          return kExitUsage;
        }
        json j;
        in >> j;
        config = ExperimentConfig::from_json(j);
      }
      if (app.count("--seed") > 0) config.master_seed = seed;
      if (exp_sigma_p) config.sigma_p = *exp_sigma_p;
      if (exp_sigma_q) config.sigma_q = *exp_sigma_q;
      if (exp_objective) {
        config = ExperimentConfig::from_json(
            [&] {
              json j = config.to_json();
              j["objective"] = *exp_objective;
              return j;
            }());
      }
      if (exp_reps) config.repetitions = *exp_reps;
      if (exp_n_test) config.n_test = *exp_n_test;
      if (exp_threads) config.threads = *exp_threads;
      if (!exp_m_values.empty()) config.m_values = exp_m_values;

      const ExperimentResult result = run_experiment(config);
      write_experiment_outputs(result, out_dir);
      std::cout << results_csv(result);
      std::cerr << "wrote results.csv, results.json, plot.svg to " << out_dir << "\n";
      return kExitOk;
    }
    if (verify_cmd->parsed()) {
      if (trials == 0) {
        trials = suite == "validity" ? 2000 : (suite == "lipschitz-lemma" ? 1000 : 200);
      }
      return run_verify(suite, trials, verify_delta, seed, verify_threads, verify_points,
                        verify_n_mc);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
