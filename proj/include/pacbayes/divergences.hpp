#pragma once

#include "pacbayes/measures.hpp"

namespace pacbayes {

enum class DivergenceKind { KL, BernoulliKL, TV, W1Exact, W2Gaussian, W1ProjGaussUpper };

const char* to_string(DivergenceKind kind);

struct DivergenceValue {
  double value;
  DivergenceKind kind;
};

/// KL(Q || P) for isotropic Gaussians of equal dimension d:
///   ||mu_Q - mu_P||^2 / (2 sigma_P^2) + d (ln(sigma_P/sigma_Q) + sigma_Q^2/(2 sigma_P^2) - 1/2).
/// Throws UndefinedValueError when either sigma is zero.
DivergenceValue kl_gaussian_isotropic(const GaussianMeasure& q, const GaussianMeasure& p);

/// kl(p || q) between Bernoulli(p) and Bernoulli(q), with 0 ln(0/x) = 0.
/// Undefined (throws) when q is 0 or 1 and p differs from it.
DivergenceValue kl_bernoulli(double p, double q);

/// Largest q in [p, 1] with kl(p || q) <= eps, by bisection to 1e-12.
double kl_bernoulli_inverse_upper(double p, double eps);

/// Total variation (1/2) sum |q_i - p_i| between measures on a shared support.
DivergenceValue tv_discrete(const DiscreteMeasure& q, const DiscreteMeasure& p);

/// Exact 1-Wasserstein distance between discrete measures on a finite metric
/// space, solved as a balanced transportation problem.
DivergenceValue w1_discrete_exact(const DiscreteMeasure& q, const DiscreteMeasure& p,
                                  const FiniteMetricSpace& space);

/// 2-Wasserstein distance between isotropic Gaussians:
///   sqrt(||mu_Q - mu_P||^2 + d (sigma_Q - sigma_P)^2).
DivergenceValue w2_gaussian(const GaussianMeasure& q, const GaussianMeasure& p);

/// Closed-form upper bound on W1 between two Gaussians projected onto the
/// same radius-r ball:
///   sqrt(||mu_Q - mu_P||^2 + d (sigma_Q - sigma_P)^2)
///     + sqrt(pi/2) sigma_Q erfc((r - s_Q) / (sqrt(2) sigma_Q))
///     + sqrt(pi/2) sigma_P erfc((r - s_P) / (sqrt(2) sigma_P)),
/// with s = sqrt(||mu||^2 + d sigma^2); an erfc term is exactly 0 when its
/// sigma is 0 (continuous limit). Requires r^2 >= max(s_Q^2, s_P^2) and
/// equal radii/dimensions; violations throw PreconditionError naming the
/// offending measure.
DivergenceValue w1_projected_gaussian_upper(const ProjectedGaussianMeasure& q,
                                            const ProjectedGaussianMeasure& p);

/// Complementary error function (thin wrapper, see divergences.cpp).
double erfc(double x);

}  // namespace pacbayes
