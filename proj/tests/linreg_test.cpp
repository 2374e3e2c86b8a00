#include <doctest.h>

#include <cmath>

#include "pacbayes/bounds.hpp"
#include "pacbayes/linreg.hpp"
#include "pacbayes/vecmath.hpp"

using namespace pacbayes;

namespace {

Dataset single_point_dataset(double x0, double x1, double y) {
  Dataset data;
  data.x = Matrix(1, 2);
  data.x(0, 0) = x0;
  data.x(0, 1) = x1;
  data.y = {y};
  return data;
}

}  // namespace

TEST_CASE("generate_task: support, determinism, seed sensitivity") {
  RandomSource rng(1);
  const RegressionTask task = generate_task(rng, 10);
  CHECK(task.d == 10);
  CHECK(norm(task.g) <= 0.1);

  RandomSource again(1);
  CHECK(generate_task(again, 10).g == task.g);

  RandomSource other(2);
  CHECK(generate_task(other, 10).g != task.g);
}

TEST_CASE("sample_dataset invariants") {
  RandomSource rng(3);
  const RegressionTask task = generate_task(rng, 10);
  const Dataset data = sample_dataset(rng, task, 500);
  REQUIRE(data.size() == 500);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(norm(data.x.row(i)) <= task.x_radius);
    CHECK(std::abs(data.y[i]) <= 1.0);
  }

  // zero latent vector: y is exactly the noise (clip inactive)
  RegressionTask null_task;
  null_task.d = 3;
  null_task.g = Vec(3, 0.0);
  RandomSource rng2(4);
  const Dataset noise_only = sample_dataset(rng2, null_task, 100);
  for (double y : noise_only.y) CHECK(std::abs(y) <= 0.5);

  // symmetry: mean of y vanishes at Monte-Carlo scale
  RandomSource rng3(5);
  const Dataset big = sample_dataset(rng3, task, 100000);
  double mean = 0.0;
  for (double y : big.y) mean += y;
  mean /= static_cast<double>(big.size());
  CHECK(std::abs(mean) <= 0.01);
}

TEST_CASE("empirical_risk_closed_form on hand-computed cases") {
  const Dataset data = single_point_dataset(1.0, 0.0, 1.0);
  PosteriorParams post;
  post.mu_q = {1.0, 0.0};
  post.sigma_q = 0.0;
  CHECK(empirical_risk_closed_form(data, post) == 0.0);
  post.sigma_q = 0.2;
  CHECK(empirical_risk_closed_form(data, post) == doctest::Approx(0.01).epsilon(1e-15));
  post.mu_q = {0.0, 0.0};
  CHECK(empirical_risk_closed_form(data, post) == doctest::Approx(0.26).epsilon(1e-15));
}

TEST_CASE("closed-form risk equals the Monte-Carlo posterior average") {
  RandomSource rng(6);
  const RegressionTask task = generate_task(rng, 10);
  const Dataset data = sample_dataset(rng, task, 8);
  PosteriorParams post;
  post.mu_q = sample_uniform_ball(rng, 10, 0.05);
  post.sigma_q = 0.02;

  const double closed = empirical_risk_closed_form(data, post);
  const GaussianMeasure posterior(post.mu_q, post.sigma_q);
  RunningStats stats;
  const int n = 1000000;
  for (int s = 0; s < n; ++s) {
    const Vec h = sample_gaussian(rng, posterior);
    stats.add(residual_squared_sum(data, h) / (4.0 * static_cast<double>(data.size())));
  }
  const double se = stats.stddev() / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(stats.mean() - closed) <= 4.0 * se);
}

TEST_CASE("quadratic loss stays in [0,1] over sampled batches and the unit ball") {
  RandomSource rng(7);
  const RegressionTask task = generate_task(rng, 10);
  const Dataset data = sample_dataset(rng, task, 2000);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec h = sample_uniform_ball(rng, 10, 1.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double r = dot(data.x.row(i), h) - data.y[i];
      const double loss = r * r / 4.0;
      CHECK(loss >= 0.0);
      CHECK(loss <= 1.0);
    }
  }
}

TEST_CASE("objective trivial identities") {
  RandomSource rng(8);
  const RegressionTask task = generate_task(rng, 10);
  const Dataset data = sample_dataset(rng, task, 100);
  const int m = static_cast<int>(data.size());

  PosteriorParams post;
  post.mu_q = Vec(10, 0.0);
  post.sigma_q = 0.0;

  // Dirac posterior == Dirac prior: only the log residual remains
  const ProjectedGaussianMeasure dirac_prior(GaussianMeasure(Vec(10, 0.0), 0.0), 1.0);
  const double expected =
      empirical_risk_closed_form(data, post) + std::sqrt(std::log(2.0 * m / 0.05) / (2.0 * (m - 1)));
  CHECK(wpb_objective(data, post, dirac_prior, 0.05) ==
        doctest::Approx(expected).epsilon(1e-15));

  // KLPB at mu_q = mu_p, sigma_q = sigma_p
  post.sigma_q = 1e-2;
  const GaussianMeasure prior(Vec(10, 0.0), 1e-2);
  CHECK(klpb_objective(data, post, prior, 0.05) ==
        doctest::Approx(empirical_risk_closed_form(data, post) +
                        std::sqrt(std::log(m / 0.05) / (2.0 * (m - 1))))
            .epsilon(1e-15));

  // growing ||mu_q - mu_p|| strictly increases the WPB objective (Dirac regime)
  post.sigma_q = 0.0;
  post.mu_q = Vec(10, 0.0);
  post.mu_q[0] = 0.01;
  const double near = wpb_objective(data, post, dirac_prior, 0.05);
  post.mu_q[0] = 0.03;
  const double far = wpb_objective(data, post, dirac_prior, 0.05);
  CHECK(far > near);
}

TEST_CASE("analytic gradients match finite differences at spot points") {
  RandomSource rng(9);
  const RegressionTask task = generate_task(rng, 10);
  const Dataset data = sample_dataset(rng, task, 50);
  const GaussianMeasure prior(Vec(10, 0.0), 1e-2);

  for (Objective which : {Objective::WPB, Objective::KLPB}) {
    for (int trial = 0; trial < 5; ++trial) {
      PosteriorParams post;
      post.sigma_q = 1e-3;
      do {
        post.mu_q = sample_uniform_ball(rng, 10, 0.04);
      } while (norm(post.mu_q) < 0.002);
      const Vec analytic = objective_gradient(data, post, prior, 0.05, 1.0, which);
      Vec numeric(10);
      const double h = 1e-6;
      for (std::size_t k = 0; k < 10; ++k) {
        PosteriorParams up = post, down = post;
        up.mu_q[k] += h;
        down.mu_q[k] -= h;
        double f_up, f_down;
        if (which == Objective::WPB) {
          const ProjectedGaussianMeasure proj_prior(prior, 1.0);
          f_up = wpb_objective(data, up, proj_prior, 0.05);
          f_down = wpb_objective(data, down, proj_prior, 0.05);
        } else {
          f_up = klpb_objective(data, up, prior, 0.05);
          f_down = klpb_objective(data, down, prior, 0.05);
        }
        numeric[k] = (f_up - f_down) / (2.0 * h);
      }
      double diff = 0.0;
      for (std::size_t k = 0; k < 10; ++k) {
        diff += (analytic[k] - numeric[k]) * (analytic[k] - numeric[k]);
      }
      CHECK(std::sqrt(diff) / norm(analytic) <= 1e-5);
    }
  }
}

TEST_CASE("gradient of the empirical risk vanishes at the least-squares fit") {
  // perfect fit: residuals are zero, so the gradient is exactly zero
  Dataset data;
  data.x = Matrix(2, 2);
  data.x(0, 0) = 0.05;
  data.x(1, 1) = 0.08;
  PosteriorParams post;
  post.mu_q = {0.02, -0.01};
  post.sigma_q = 1e-3;
  data.y = {0.05 * 0.02, 0.08 * -0.01};
  const GaussianMeasure prior(Vec{0.02, -0.01}, 1e-2);  // mu_p = mu_q
  // KLPB gradient at mu_q = mu_p has zero contribution from the KL term
  const Vec grad = objective_gradient(data, post, prior, 0.05, 1.0, Objective::KLPB);
  CHECK(norm(grad) == 0.0);
}

TEST_CASE("subgradient at the Wasserstein kink is the data term alone") {
  RandomSource rng(10);
  const RegressionTask task = generate_task(rng, 4);
  const Dataset data = sample_dataset(rng, task, 20);
  PosteriorParams post;
  post.mu_q = Vec(4, 0.0);
  post.sigma_q = 0.0;
  const GaussianMeasure prior(Vec(4, 0.0), 0.0);
  const Vec grad = objective_gradient(data, post, prior, 0.05, 1.0, Objective::WPB);
  // equals the pure empirical-risk gradient at mu_q = 0
  Vec expected(4, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.x.row(i);
    for (std::size_t k = 0; k < 4; ++k) expected[k] += -data.y[i] * row[k];
  }
  for (double& v : expected) v /= 2.0 * static_cast<double>(data.size());
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(grad[k] == doctest::Approx(expected[k]).epsilon(1e-14));
  }
}

TEST_CASE("adam_project_step: fixed point, projection, determinism") {
  PosteriorParams post;
  post.mu_q = {0.01, 0.02};
  post.sigma_q = 0.0;
  post.r_q = 0.05;

  OptimizerState state = make_optimizer_state(2);
  const PosteriorParams unchanged = adam_project_step(state, post, Vec{0.0, 0.0});
  CHECK(unchanged.mu_q == post.mu_q);

  // large gradients cannot push the mean outside the r_q ball
  OptimizerState state2 = make_optimizer_state(2);
  PosteriorParams current = post;
  for (int step = 0; step < 200; ++step) {
    current = adam_project_step(state2, current, Vec{-5.0, -3.0});
    CHECK(norm(current.mu_q) <= post.r_q + 1e-15);
  }

  // identical state and gradient sequences give identical trajectories
  OptimizerState sa = make_optimizer_state(2), sb = make_optimizer_state(2);
  PosteriorParams pa = post, pb = post;
  for (int step = 0; step < 10; ++step) {
    const Vec grad{0.1 * (step + 1), -0.05};
    pa = adam_project_step(sa, pa, grad);
    pb = adam_project_step(sb, pb, grad);
  }
  CHECK(pa.mu_q == pb.mu_q);
}

TEST_CASE("train_posterior: determinism, feasibility, descent") {
  RandomSource rng(11);
  const RegressionTask task = generate_task(rng, 10);
  const Dataset data = sample_dataset(rng, task, 100);

  TrainConfig config;
  config.objective = Objective::KLPB;
  config.sigma_q = 1e-3;
  config.sigma_p = 1e-2;
  config.max_epochs = 300;

  RandomSource ta(100), tb(100);
  const PosteriorParams a = train_posterior(ta, data, config);
  const PosteriorParams b = train_posterior(tb, data, config);
  CHECK(a.mu_q == b.mu_q);
  CHECK(norm(a.mu_q) <= config.r_q + 1e-15);

  // The optimum of this objective sits essentially at the zero init, so the
  // final iterate may ride Adam's limit cycle a hair above it; allow that
  // oscillation scale but nothing more.
  const GaussianMeasure prior(Vec(10, 0.0), config.sigma_p);
  PosteriorParams zero;
  zero.mu_q = Vec(10, 0.0);
  zero.sigma_q = config.sigma_q;
  CHECK(klpb_objective(data, a, prior, config.delta) <=
        klpb_objective(data, zero, prior, config.delta) + 1e-5);

  // With a loose prior the data term dominates and training genuinely
  // descends from the zero initialization.
  TrainConfig loose = config;
  loose.sigma_p = 1.0;
  loose.sigma_q = 0.1;
  RandomSource tc(101);
  const PosteriorParams trained = train_posterior(tc, data, loose);
  const GaussianMeasure loose_prior(Vec(10, 0.0), loose.sigma_p);
  PosteriorParams loose_zero;
  loose_zero.mu_q = Vec(10, 0.0);
  loose_zero.sigma_q = loose.sigma_q;
  CHECK(klpb_objective(data, trained, loose_prior, config.delta) <
        klpb_objective(data, loose_zero, loose_prior, config.delta));
}

TEST_CASE("objective at convergence is invariant to the shuffling seed") {
  RandomSource rng(12);
  const RegressionTask task = generate_task(rng, 10);
  const Dataset data = sample_dataset(rng, task, 128);

  TrainConfig config;
  config.objective = Objective::KLPB;
  config.sigma_q = 1e-3;
  config.sigma_p = 1e-2;
  config.max_batch_size = 64;  // two batches per epoch, so order matters
  config.max_epochs = 2000;

  RandomSource shuffle_a(1001), shuffle_b(2002);
  const PosteriorParams a = train_posterior(shuffle_a, data, config);
  const PosteriorParams b = train_posterior(shuffle_b, data, config);
  const GaussianMeasure prior(Vec(10, 0.0), config.sigma_p);
  const double fa = klpb_objective(data, a, prior, config.delta);
  const double fb = klpb_objective(data, b, prior, config.delta);
  CHECK(std::abs(fa - fb) <= 1e-6);
}

TEST_CASE("train_posterior on the KLPB objective keeps the Wasserstein bound small") {
  RandomSource rng(13);
  const RegressionTask task = generate_task(rng, 10);
  const Dataset data = sample_dataset(rng, task, 100);

  TrainConfig config;  // defaults: KLPB, sigma_p = 1e-2, sigma_q = 1e-3
  RandomSource train_rng(14);
  const PosteriorParams post = train_posterior(train_rng, data, config);

  const ProjectedGaussianMeasure q(GaussianMeasure(post.mu_q, post.sigma_q), 1.0);
  const ProjectedGaussianMeasure p(GaussianMeasure(Vec(10, 0.0), config.sigma_p), 1.0);
  CHECK(w1_projected_gaussian_upper(q, p).value <= 0.05);
}

TEST_CASE("test_risk_monte_carlo") {
  // g = 0, mu_q = 0, sigma_q = 0: risk is E xi^2 / 4 = 1/48
  RegressionTask task;
  task.d = 10;
  task.g = Vec(10, 0.0);
  PosteriorParams post;
  post.mu_q = Vec(10, 0.0);
  post.sigma_q = 0.0;
  RandomSource rng(15);
  const double risk = test_risk_monte_carlo(rng, task, post, 100000);
  CHECK(risk == doctest::Approx(1.0 / 48.0).epsilon(0.02));
  CHECK(risk >= 0.0);

  // two disjoint seed halves agree within 3 standard errors:
  // SE of the mean of xi^2/4 with n = 100000 each
  RandomSource rng_b(16);
  const double risk_b = test_risk_monte_carlo(rng_b, task, post, 100000);
  // var(xi^2/4) = (E xi^4 - (E xi^2)^2) / 16 with xi ~ U[-1/2, 1/2]
  const double var = (1.0 / 80.0 - 1.0 / 144.0) / 16.0;
  const double se = std::sqrt(2.0 * var / 100000.0);  // difference of two means
  CHECK(std::abs(risk - risk_b) <= 3.0 * se);
}
