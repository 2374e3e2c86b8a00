#pragma once

#include <cstdint>

#include "pacbayes/measures.hpp"
#include "pacbayes/random.hpp"
#include "pacbayes/vecmath.hpp"

namespace pacbayes {

/// Regression task: targets y = clip(g . x + xi) with x uniform on the
/// x_radius ball and xi uniform on [-noise_half_width, noise_half_width].
struct RegressionTask {
  Vec g;  // latent vector, ||g|| <= x_radius
  int d = 0;
  double x_radius = 0.1;
  double noise_half_width = 0.5;
};

struct Dataset {
  Matrix x;  // m-by-d, rows are samples
  Vec y;     // length m
  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return x.cols(); }
};

/// Gaussian posterior parameters N(mu_q, sigma_q^2 I); the mean is kept in
/// the radius-r_q ball by the projected optimizer.
struct PosteriorParams {
  Vec mu_q;
  double sigma_q = 0.0;
  double r_q = 0.05;
};

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  AdamParams params;
  std::int64_t step = 0;
  Vec first_moment;
  Vec second_moment;
};

OptimizerState make_optimizer_state(std::size_t dim, AdamParams params = {});

enum class Objective { WPB, KLPB };

const char* to_string(Objective objective);

struct TrainConfig {
  Objective objective = Objective::KLPB;
  double sigma_q = 1e-3;
  double sigma_p = 1e-2;
  double delta = 0.05;
  double r = 1.0;    // hypothesis ball radius (prior/posterior projection ball)
  double r_q = 0.05; // posterior mean cap
  AdamParams adam;
  int max_epochs = 2000;
  double tol = 1e-8;  // stop when the full-data objective changes less than this per epoch
  int max_batch_size = 256;
};

RegressionTask generate_task(RandomSource& rng, int d, double x_radius = 0.1);

Dataset sample_dataset(RandomSource& rng, const RegressionTask& task, int m);

/// Posterior expectation of the empirical risk, in closed form:
///   (||X mu_q - y||^2 + sigma_q^2 ||X||_F^2) / (4 m).
double empirical_risk_closed_form(const Dataset& data, const PosteriorParams& post);

/// Wasserstein-bound training objective (empirical risk plus the explicit
/// Wasserstein complexity at the current posterior mean).
double wpb_objective(const Dataset& data, const PosteriorParams& post,
                     const ProjectedGaussianMeasure& prior, double delta);

/// KL-bound training objective. Throws UndefinedValueError for zero sigmas.
double klpb_objective(const Dataset& data, const PosteriorParams& post,
                      const GaussianMeasure& prior, double delta);

/// Analytic gradient in mu_q of the selected objective. At the non-smooth
/// point mu_q == mu_p with sigma_q == sigma_p the Wasserstein term
/// contributes the zero subgradient. `r` is the hypothesis ball radius used
/// by the WPB objective (ignored for KLPB).
Vec objective_gradient(const Dataset& data, const PosteriorParams& post,
                       const GaussianMeasure& prior, double delta, double r,
                       Objective which);

/// One Adam update on mu_q followed by projection onto the r_q ball.
PosteriorParams adam_project_step(OptimizerState& state, const PosteriorParams& post,
                                  std::span<const double> grad);

/// Mini-batch projected Adam from mu_q = 0, shuffled epochs, batch size
/// min(m, max_batch_size); stops once the full-data objective moves by less
/// than tol over an epoch or after max_epochs.
PosteriorParams train_posterior(RandomSource& rng, const Dataset& data,
                                const TrainConfig& config);

/// Closed-form posterior risk on n_test freshly drawn samples.
double test_risk_monte_carlo(RandomSource& rng, const RegressionTask& task,
                             const PosteriorParams& post, int n_test);

/// Sum of squared residuals ||X h - y||^2; shared by the closed-form risk
/// and Monte-Carlo paths so equal inputs give bitwise-equal values.
double residual_squared_sum(const Dataset& data, std::span<const double> h);

}  // namespace pacbayes
