#include "pacbayes/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pacbayes/bounds.hpp"
#include "pacbayes/divergences.hpp"
#include "pacbayes/parallel.hpp"

namespace pacbayes::verify {

ValidityReport make_validity_report(long long trials, long long violations, double delta) {
  ValidityReport report;
  report.trials = trials;
  report.violations = violations;
  report.delta = delta;
  report.slack = 2.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
  report.pass = report.rate() <= delta + report.slack;
  return report;
}

namespace {

// Flow solve on a candidate basis by leaf elimination. Returns false when
// the cell set is not a feasible spanning forest for the marginals.
bool solve_basis(const std::vector<std::pair<int, int>>& cells, std::span<const double> q,
                 std::span<const double> p, const FiniteMetricSpace& space, double& cost_out) {
  const int n = static_cast<int>(space.size());
  std::vector<double> row_rest(q.begin(), q.end());
  std::vector<double> col_rest(p.begin(), p.end());
  std::vector<int> row_deg(n, 0), col_deg(n, 0);
  std::vector<char> used(cells.size(), 0);
  for (const auto& [i, j] : cells) {
    ++row_deg[i];
    ++col_deg[j];
  }
  constexpr double kEps = 1e-12;
  double cost = 0.0;
  std::size_t remaining = cells.size();
  while (remaining > 0) {
    bool progressed = false;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (used[c]) continue;
      const auto [i, j] = cells[c];
      double flow;
      if (row_deg[i] == 1) {
        flow = row_rest[i];
      } else if (col_deg[j] == 1) {
        flow = col_rest[j];
      } else {
        continue;
      }
      if (flow < -kEps) return false;
      used[c] = 1;
      --remaining;
      --row_deg[i];
      --col_deg[j];
      row_rest[i] -= flow;
      col_rest[j] -= flow;
      cost += std::max(flow, 0.0) * space.distance(static_cast<std::size_t>(i),
                                                   static_cast<std::size_t>(j));
      progressed = true;
    }
    if (!progressed) return false;  // a cycle: not a basis
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(row_rest[i]) > kEps || std::abs(col_rest[i]) > kEps) return false;
  }
  cost_out = cost;
  return true;
}

}  // namespace

double w1_bruteforce_oracle(const DiscreteMeasure& q, const DiscreteMeasure& p,
                            const FiniteMetricSpace& space) {
  const int n = static_cast<int>(space.size());
  if (q.size() != space.size() || p.size() != space.size()) {
    throw std::invalid_argument("w1_bruteforce_oracle: measures must live on the space");
  }
  if (n > 4) {
    throw std::invalid_argument("w1_bruteforce_oracle: supports larger than 4 unsupported");
  }
  const int num_cells = n * n;
  const int basis_size = 2 * n - 1;
  std::vector<int> pick(static_cast<std::size_t>(basis_size));
  double best = std::numeric_limits<double>::infinity();

  // Enumerate all cell subsets of basis size (at most C(16,7) = 11440).
  std::vector<std::pair<int, int>> cells(static_cast<std::size_t>(basis_size));
  auto evaluate = [&]() {
    for (int c = 0; c < basis_size; ++c) {
      cells[static_cast<std::size_t>(c)] = {pick[static_cast<std::size_t>(c)] / n,
                                            pick[static_cast<std::size_t>(c)] % n};
    }
    double cost = 0.0;
    if (solve_basis(cells, q.weights, p.weights, space, cost)) best = std::min(best, cost);
  };
  // Iterative combination enumeration.
  for (int c = 0; c < basis_size; ++c) pick[static_cast<std::size_t>(c)] = c;
  while (true) {
    evaluate();
    int idx = basis_size - 1;
    while (idx >= 0 && pick[static_cast<std::size_t>(idx)] == num_cells - basis_size + idx) {
      --idx;
    }
    if (idx < 0) break;
    ++pick[static_cast<std::size_t>(idx)];
    for (int c = idx + 1; c < basis_size; ++c) {
      pick[static_cast<std::size_t>(c)] = pick[static_cast<std::size_t>(c - 1)] + 1;
    }
  }
  if (!std::isfinite(best)) throw std::logic_error("w1_bruteforce_oracle: no feasible basis");
  return best;
}

FiniteClassScenario default_finite_class_scenario() {
  const std::size_t n = 8;   // hypotheses on [0,1]
  const std::size_t k = 16;  // data points on [0,1]
  std::vector<double> hyp(n), dat(k);
  for (std::size_t i = 0; i < n; ++i) hyp[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < k; ++j) dat[j] = static_cast<double>(j) / static_cast<double>(k - 1);

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = std::abs(hyp[i] - hyp[j]);
  }
  Matrix loss(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) loss(i, j) = std::abs(hyp[i] - dat[j]);
  }
  Vec weights(k);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    weights[j] = 2.0 + std::sin(static_cast<double>(j));  // fixed, non-uniform
    total += weights[j];
  }
  for (double& w : weights) w /= total;

  FiniteClassScenario scenario{FiniteMetricSpace(n, std::move(dist)), std::move(loss),
                               std::move(weights), 1.0};
  return scenario;
}

namespace {

Vec expected_risks(const Matrix& loss, std::span<const double> weights) {
  Vec risks(loss.rows(), 0.0);
  for (std::size_t i = 0; i < loss.rows(); ++i) {
    risks[i] = dot(loss.row(i), weights);
  }
  return risks;
}

Vec empirical_risks(const Matrix& loss, std::span<const std::size_t> sample) {
  Vec risks(loss.rows(), 0.0);
  for (std::size_t i = 0; i < loss.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t idx : sample) sum += loss(i, idx);
    risks[i] = sum / static_cast<double>(sample.size());
  }
  return risks;
}

std::vector<std::size_t> draw_sample(RandomSource& rng, std::span<const double> weights,
                                     int m) {
  std::vector<std::size_t> sample(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) {
    const double u = rng.uniform01();
    double acc = 0.0;
    std::size_t pick = weights.size() - 1;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      acc += weights[j];
      if (u < acc) {
        pick = j;
        break;
      }
    }
    sample[static_cast<std::size_t>(s)] = pick;
  }
  return sample;
}

}  // namespace

double lipschitz_constant_bruteforce(const FiniteMetricSpace& space, const Matrix& loss_table,
                                     std::span<const std::size_t> data_indices,
                                     std::span<const double> dist_weights) {
  if (loss_table.rows() != space.size()) {
    throw std::invalid_argument("lipschitz_constant_bruteforce: loss rows must match space");
  }
  if (loss_table.cols() != dist_weights.size()) {
    throw std::invalid_argument("lipschitz_constant_bruteforce: weight length mismatch");
  }
  const Vec expected = expected_risks(loss_table, dist_weights);
  const Vec empirical = empirical_risks(loss_table, data_indices);
  double sharp = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double gap_i = expected[i] - empirical[i];
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      const double rho = space.distance(i, j);
      if (rho == 0.0) continue;
      const double gap_j = expected[j] - empirical[j];
      sharp = std::max(sharp, std::abs(gap_i * gap_i - gap_j * gap_j) / rho);
    }
  }
  return sharp;
}

ValidityReport lemma_lipschitz_validity(const RandomSource& rng,
                                        const FiniteClassScenario& scenario, int trials,
                                        int m, double delta, int threads) {
  if (trials < 1 || m < 1) throw std::invalid_argument("lemma_lipschitz_validity: bad sizes");
  const double h_count = static_cast<double>(scenario.space.size());
  const double threshold = 8.0 * scenario.loss_lipschitz / static_cast<double>(m) *
                           std::log(2.0 * h_count / delta);
  std::vector<char> violated(static_cast<std::size_t>(trials), 0);
  parallel_for(trials, threads, [&](std::int64_t t) {
    RandomSource trial_rng = rng.derive(static_cast<std::uint64_t>(t));
    const auto sample = draw_sample(trial_rng, scenario.data_weights, m);
    const double sharp = lipschitz_constant_bruteforce(scenario.space, scenario.loss,
                                                       sample, scenario.data_weights);
    violated[static_cast<std::size_t>(t)] = sharp > threshold ? 1 : 0;
  });
  long long violations = 0;
  for (char v : violated) violations += v;
  return make_validity_report(trials, violations, delta);
}

ValidityReport bound_validity_mc(const RandomSource& rng, const FiniteClassScenario& scenario,
                                 BoundSelector bound, int trials, int m, double delta,
                                 int threads, double beta) {
  if (trials < 1 || m < 2) throw std::invalid_argument("bound_validity_mc: bad sizes");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("bound_validity_mc: delta must lie in (0,1]");
  }
  // delta == 1 is the vacuous-confidence case; evaluate the bound just
  // inside the open interval it is defined on.
  const double delta_eval = std::min(delta, 1.0 - 1e-9);
  const std::size_t n = scenario.space.size();
  const Vec expected = expected_risks(scenario.loss, scenario.data_weights);
  const DiscreteMeasure prior(Vec(n, 1.0 / static_cast<double>(n)));

  std::vector<char> violated(static_cast<std::size_t>(trials), 0);
  parallel_for(trials, threads, [&](std::int64_t t) {
    RandomSource trial_rng = rng.derive(static_cast<std::uint64_t>(t));
    const auto sample = draw_sample(trial_rng, scenario.data_weights, m);
    const Vec empirical = empirical_risks(scenario.loss, sample);

    // Gibbs posterior over the class; beta = 0 gives back the prior.
    Vec weights(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = prior.weights[i] * std::exp(-beta * empirical[i]);
      total += weights[i];
    }
    for (double& w : weights) w /= total;
    const DiscreteMeasure posterior(std::move(weights));

    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gap += posterior.weights[i] * (expected[i] - empirical[i]);
    }

    double bound_value = 0.0;
    if (bound == BoundSelector::TVPB) {
      // Exact finite-class UC bound (Hoeffding + union) at delta/2.
      const double uc = std::sqrt(std::log(2.0 * static_cast<double>(n) / (delta_eval / 2.0)) /
                                  (2.0 * m));
      bound_value =
          tvpb_from_uc(uc, tv_discrete(posterior, prior), m, delta_eval).bound_value;
    } else {
      double kl = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (posterior.weights[i] > 0.0) {
          kl += posterior.weights[i] * std::log(posterior.weights[i] / prior.weights[i]);
        }
      }
      bound_value =
          klpb_classic({kl, DivergenceKind::KL}, m, delta_eval).bound_value;
    }
    violated[static_cast<std::size_t>(t)] = gap > bound_value ? 1 : 0;
  });
  long long violations = 0;
  for (char v : violated) violations += v;
  return make_validity_report(trials, violations, delta);
}

namespace {

struct GradientCheckSetup {
  Dataset data;
  GaussianMeasure prior;
  double delta = 0.05;
  double r = 1.0;

  GradientCheckSetup(RandomSource& rng, double sigma_p)
      : prior(Vec(10, 0.0), sigma_p) {
    const RegressionTask task = generate_task(rng, 10);
    data = sample_dataset(rng, task, 100);
  }
};

Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& point,
                       double step) {
  Vec grad(point.size(), 0.0);
  Vec probe = point;
  for (std::size_t k = 0; k < point.size(); ++k) {
    probe[k] = point[k] + step;
    const double up = f(probe);
    probe[k] = point[k] - step;
    const double down = f(probe);
    probe[k] = point[k];
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    diff += d * d;
  }
  const double scale = std::max(norm(a), 1e-300);
  return std::sqrt(diff) / scale;
}

}  // namespace

double gradient_check(const RandomSource& rng, Objective which, int points) {
  RandomSource local = rng.derive(which == Objective::WPB ? 11 : 13);
  GradientCheckSetup setup(local, 1e-2);
  constexpr double kStep = 1e-6;
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    PosteriorParams post;
    post.sigma_q = 1e-3;
    post.r_q = 0.05;
    // Stay clear of the non-smooth point mu_q == mu_p and of the projection
    // boundary so central differences remain valid.
    do {
      post.mu_q = sample_uniform_ball(local, 10, 0.04);
    } while (norm(post.mu_q) < 0.002);

    const Vec analytic =
        objective_gradient(setup.data, post, setup.prior, setup.delta, setup.r, which);
    auto value = [&](const Vec& mu) {
      PosteriorParams probe = post;
      probe.mu_q = mu;
      if (which == Objective::WPB) {
        return wpb_objective(setup.data, probe,
                             ProjectedGaussianMeasure(setup.prior, setup.r), setup.delta);
      }
      return klpb_objective(setup.data, probe, setup.prior, setup.delta);
    };
    const Vec numeric = central_difference(value, post.mu_q, kStep);
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

double empirical_risk_gradient_check(const RandomSource& rng, int points) {
  RandomSource local = rng.derive(17);
  GradientCheckSetup setup(local, 1e-2);
  constexpr double kStep = 1e-6;
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    PosteriorParams post;
    post.sigma_q = 1e-3;
    post.r_q = 0.05;
    post.mu_q = sample_uniform_ball(local, 10, 0.04);

    // Gradient of the quadratic term alone: (1/(2m)) X^T (X mu - y).
    const std::size_t d = setup.data.dim();
    Vec analytic(d, 0.0);
    for (std::size_t i = 0; i < setup.data.size(); ++i) {
      const auto row = setup.data.x.row(i);
      const double resid = dot(row, post.mu_q) - setup.data.y[i];
      for (std::size_t k = 0; k < d; ++k) analytic[k] += resid * row[k];
    }
    for (double& gk : analytic) gk /= 2.0 * static_cast<double>(setup.data.size());

    auto value = [&](const Vec& mu) {
      PosteriorParams probe = post;
      probe.mu_q = mu;
      return empirical_risk_closed_form(setup.data, probe);
    };
    const Vec numeric = central_difference(value, post.mu_q, kStep);
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

RiskCrosscheck projected_risk_crosscheck(const RandomSource& rng, const RegressionTask& task,
                                         const PosteriorParams& post, int n_mc, double r) {
  if (n_mc < 1) throw std::invalid_argument("projected_risk_crosscheck: n_mc must be >= 1");
  RandomSource local = rng.derive(23);
  const Dataset data = sample_dataset(local, task, 100);
  const double m = static_cast<double>(data.size());

  RiskCrosscheck result;
  result.closed_form = empirical_risk_closed_form(data, post);

  const GaussianMeasure posterior_gauss(post.mu_q, post.sigma_q);
  RunningMean mc;
  for (int s = 0; s < n_mc; ++s) {
    const Vec h = sample_gaussian(local, posterior_gauss);
    const Vec projected = project_ball(h, r);
    mc.add(residual_squared_sum(data, projected) / (4.0 * m));
  }
  result.projected_mc = mc.mean();
  result.diff = std::abs(result.closed_form - result.projected_mc);
  return result;
}

}  // namespace pacbayes::verify
