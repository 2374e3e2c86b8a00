#include "pacbayes/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pacbayes/bounds.hpp"
#include "pacbayes/divergences.hpp"
#include "pacbayes/errors.hpp"

namespace pacbayes {

namespace {

double clip(double t, double lo, double hi) { return std::min(std::max(t, lo), hi); }

void require_dims(const Dataset& data, const PosteriorParams& post, const char* who) {
  if (data.dim() != post.mu_q.size()) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
  if (data.size() == 0) throw std::invalid_argument(std::string(who) + ": empty dataset");
}

}  // namespace

const char* to_string(Objective objective) {
  return objective == Objective::WPB ? "WPB" : "KLPB";
}

OptimizerState make_optimizer_state(std::size_t dim, AdamParams params) {
  OptimizerState state;
  state.params = params;
  state.first_moment.assign(dim, 0.0);
  state.second_moment.assign(dim, 0.0);
  return state;
}

RegressionTask generate_task(RandomSource& rng, int d, double x_radius) {
  if (d < 1) throw std::invalid_argument("generate_task: d must be >= 1");
  if (!(x_radius > 0.0)) throw std::invalid_argument("generate_task: x_radius must be > 0");
  RegressionTask task;
  task.d = d;
  task.x_radius = x_radius;
  task.g = sample_uniform_ball(rng, static_cast<std::size_t>(d), task.x_radius);
  return task;
}

Dataset sample_dataset(RandomSource& rng, const RegressionTask& task, int m) {
  if (m < 1) throw std::invalid_argument("sample_dataset: m must be >= 1");
  Dataset data;
  data.x = Matrix(static_cast<std::size_t>(m), static_cast<std::size_t>(task.d));
  data.y.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const Vec xi = sample_uniform_ball(rng, static_cast<std::size_t>(task.d), task.x_radius);
    std::copy(xi.begin(), xi.end(), data.x.row(static_cast<std::size_t>(i)).begin());
    const double noise = rng.uniform(-task.noise_half_width, task.noise_half_width);
    data.y[static_cast<std::size_t>(i)] = clip(dot(task.g, xi) + noise, -1.0, 1.0);
  }
  return data;
}

double residual_squared_sum(const Dataset& data, std::span<const double> h) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = dot(data.x.row(i), h) - data.y[i];
    sum += r * r;
  }
  return sum;
}

double empirical_risk_closed_form(const Dataset& data, const PosteriorParams& post) {
  require_dims(data, post, "empirical_risk_closed_form");
  const double m = static_cast<double>(data.size());
  return (residual_squared_sum(data, post.mu_q) +
          post.sigma_q * post.sigma_q * data.x.frobenius_squared()) /
         (4.0 * m);
}

double wpb_objective(const Dataset& data, const PosteriorParams& post,
                     const ProjectedGaussianMeasure& prior, double delta) {
  require_dims(data, post, "wpb_objective");
  const ProjectedGaussianMeasure q(GaussianMeasure(post.mu_q, post.sigma_q), prior.radius);
  const DivergenceValue w = w1_projected_gaussian_upper(q, prior);
  const double jhat = empirical_risk_closed_form(data, post);
  return wpb_linreg(jhat, w, static_cast<int>(data.size()), delta,
                    static_cast<int>(data.dim()), prior.radius)
      .bound_value;
}

double klpb_objective(const Dataset& data, const PosteriorParams& post,
                      const GaussianMeasure& prior, double delta) {
  require_dims(data, post, "klpb_objective");
  const GaussianMeasure q(post.mu_q, post.sigma_q);
  const double jhat = empirical_risk_closed_form(data, post);
  return klpb_linreg(jhat, q, prior, static_cast<int>(data.size()), delta).bound_value;
}

namespace {

// (1/(2m)) X^T (X mu - y)
Vec empirical_risk_gradient(const Dataset& data, std::span<const double> mu) {
  const std::size_t d = data.dim();
  Vec grad(d, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.x.row(i);
    const double r = dot(row, mu) - data.y[i];
    for (std::size_t k = 0; k < d; ++k) grad[k] += r * row[k];
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(data.size()));
  for (double& g : grad) g *= scale;
  return grad;
}

// Gradient in mu_q of W_bound(mu_q): the mean-difference direction of the
// W2 term (zero subgradient at the kink) plus the Q-side erfc tail term
// exp(-u^2) mu_q / s.
Vec w_bound_gradient(const PosteriorParams& post, const GaussianMeasure& prior_base,
                     double r) {
  const std::size_t d = post.mu_q.size();
  const double dd = static_cast<double>(d);
  Vec grad(d, 0.0);
  const double ds = post.sigma_q - prior_base.sigma;
  const double w2 = std::sqrt(squared_distance(post.mu_q, prior_base.mean) + dd * ds * ds);
  if (w2 > 0.0) {
    for (std::size_t k = 0; k < d; ++k) {
      grad[k] = (post.mu_q[k] - prior_base.mean[k]) / w2;
    }
  }
  if (post.sigma_q > 0.0) {
    const double s =
        std::sqrt(squared_norm(post.mu_q) + dd * post.sigma_q * post.sigma_q);
    const double u = (r - s) / (std::sqrt(2.0) * post.sigma_q);
    const double tail = std::exp(-u * u);
    if (tail > 0.0) {
      for (std::size_t k = 0; k < d; ++k) grad[k] += tail * post.mu_q[k] / s;
    }
  }
  return grad;
}

// Gradient in mu_q of the complexity term alone, with the sample count m of
// the bound held fixed (mini-batch training still penalizes at the full m).
Vec complexity_gradient(const PosteriorParams& post, const GaussianMeasure& prior,
                        double delta, double r, int m, Objective which) {
  const std::size_t d = post.mu_q.size();
  Vec grad(d, 0.0);
  if (which == Objective::KLPB) {
    if (post.sigma_q == 0.0 || prior.sigma == 0.0) {
      throw UndefinedValueError("objective_gradient: KLPB undefined for sigma = 0");
    }
    const GaussianMeasure q(post.mu_q, post.sigma_q);
    const double inside = (kl_gaussian_isotropic(q, prior).value + std::log(m / delta)) /
                          (2.0 * (m - 1));
    const double chain =
        1.0 / (prior.sigma * prior.sigma * 2.0 * (m - 1)) / (2.0 * std::sqrt(inside));
    for (std::size_t k = 0; k < d; ++k) {
      grad[k] = chain * (post.mu_q[k] - prior.mean[k]);
    }
    return grad;
  }

  const ProjectedGaussianMeasure q(GaussianMeasure(post.mu_q, post.sigma_q), r);
  const ProjectedGaussianMeasure p(prior, r);
  const double w = w1_projected_gaussian_upper(q, p).value;
  const double uc = uc_linreg(m, delta / 4.0, static_cast<int>(d));
  const double ucg = ucg_linreg(m, delta / 4.0, static_cast<int>(d), r);
  const double inside =
      2.0 * uc * ucg * w + std::log(2.0 * m / delta) / (2.0 * (m - 1));
  const double chain = uc * ucg / std::sqrt(inside);
  const Vec w_grad = w_bound_gradient(post, prior, r);
  for (std::size_t k = 0; k < d; ++k) grad[k] = chain * w_grad[k];
  return grad;
}

}  // namespace

Vec objective_gradient(const Dataset& data, const PosteriorParams& post,
                       const GaussianMeasure& prior, double delta, double r,
                       Objective which) {
  require_dims(data, post, "objective_gradient");
  Vec grad = empirical_risk_gradient(data, post.mu_q);
  const Vec penalty = complexity_gradient(post, prior, delta, r,
                                          static_cast<int>(data.size()), which);
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += penalty[k];
  return grad;
}

PosteriorParams adam_project_step(OptimizerState& state, const PosteriorParams& post,
                                  std::span<const double> grad) {
  const std::size_t d = post.mu_q.size();
  if (state.first_moment.size() != d || grad.size() != d) {
    throw std::invalid_argument("adam_project_step: dimension mismatch");
  }
  const AdamParams& a = state.params;
  ++state.step;
  const double bc1 = 1.0 - std::pow(a.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(a.beta2, static_cast<double>(state.step));
  Vec updated = post.mu_q;
  for (std::size_t k = 0; k < d; ++k) {
    state.first_moment[k] = a.beta1 * state.first_moment[k] + (1.0 - a.beta1) * grad[k];
    state.second_moment[k] =
        a.beta2 * state.second_moment[k] + (1.0 - a.beta2) * grad[k] * grad[k];
    const double m_hat = state.first_moment[k] / bc1;
    const double v_hat = state.second_moment[k] / bc2;
    updated[k] -= a.learning_rate * m_hat / (std::sqrt(v_hat) + a.epsilon);
  }
  PosteriorParams result = post;
  result.mu_q = norm(updated) <= post.r_q ? std::move(updated)
                                          : project_ball(updated, post.r_q);
  return result;
}

PosteriorParams train_posterior(RandomSource& rng, const Dataset& data,
                                const TrainConfig& config) {
  const std::size_t d = data.dim();
  const int m = static_cast<int>(data.size());
  const GaussianMeasure prior(Vec(d, 0.0), config.sigma_p);

  PosteriorParams post;
  post.mu_q.assign(d, 0.0);
  post.sigma_q = config.sigma_q;
  post.r_q = config.r_q;

  auto full_objective = [&](const PosteriorParams& p) {
    if (config.objective == Objective::WPB) {
      return wpb_objective(data, p, ProjectedGaussianMeasure(prior, config.r), config.delta);
    }
    return klpb_objective(data, p, prior, config.delta);
  };

  OptimizerState state = make_optimizer_state(d, config.adam);
  const int batch_size = std::min(m, config.max_batch_size);
  std::vector<std::size_t> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);

  double previous = full_objective(post);
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (int start = 0; start < m; start += batch_size) {
      const int count = std::min(batch_size, m - start);
      Dataset batch;
      batch.x = Matrix(static_cast<std::size_t>(count), d);
      batch.y.resize(static_cast<std::size_t>(count));
      for (int b = 0; b < count; ++b) {
        const std::size_t src = order[static_cast<std::size_t>(start + b)];
        const auto row = data.x.row(src);
        std::copy(row.begin(), row.end(), batch.x.row(static_cast<std::size_t>(b)).begin());
        batch.y[static_cast<std::size_t>(b)] = data.y[src];
      }
      // Unbiased batch gradient of the empirical risk; the complexity term
      // is penalized at the full-sample m.
      Vec grad = empirical_risk_gradient(batch, post.mu_q);
      const Vec penalty =
          complexity_gradient(post, prior, config.delta, config.r, m, config.objective);
      for (std::size_t k = 0; k < d; ++k) grad[k] += penalty[k];
      post = adam_project_step(state, post, grad);
    }
    const double current = full_objective(post);
    if (std::abs(previous - current) < config.tol) break;
    previous = current;
  }
  return post;
}

double test_risk_monte_carlo(RandomSource& rng, const RegressionTask& task,
                             const PosteriorParams& post, int n_test) {
  if (n_test < 1) throw std::invalid_argument("test_risk_monte_carlo: n_test must be >= 1");
  const Dataset test = sample_dataset(rng, task, n_test);
  return empirical_risk_closed_form(test, post);
}

}  // namespace pacbayes
