#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pacbayes/divergences.hpp"
#include "pacbayes/measures.hpp"

namespace pacbayes {

struct BoundInputs {
  int m = 0;
  double delta = 0.0;
  std::optional<DivergenceValue> divergence;
  std::optional<double> uc;
  std::optional<double> ucg;
  std::vector<std::pair<std::string, double>> extra;
};

/// A bound value decomposed into its empirical-risk and complexity parts.
/// Gap-only bounds leave empirical_risk absent and bound_value == complexity.
struct BoundReport {
  std::optional<double> empirical_risk;
  double complexity = 0.0;
  double bound_value = 0.0;
  BoundInputs inputs;
};

/// Classical KL PAC-Bayes gap bound: sqrt((KL + ln(m/delta)) / (2(m-1))).
BoundReport klpb_classic(DivergenceValue kl, int m, double delta);

/// IPM template gap bound: sqrt((gamma + ln(m/delta)) / (2(m-1))).
BoundReport ipm_pb_template(double gamma, int m, double delta);

/// TV gap bound: sqrt(uc^2 * TV + ln(2m/delta) / (2(m-1))), where
/// uc_half_delta is the uniform-convergence bound evaluated at (m, delta/2).
BoundReport tvpb_from_uc(double uc_half_delta, DivergenceValue tv, int m, double delta);

/// VC-class TV gap bound: sqrt(c (VC + ln(1/delta))/m * TV + ln(m/delta)/(2(m-1))).
/// The universal constant c has no known explicit value and must be supplied.
BoundReport tvpb_vc(int vc_dim, double c, DivergenceValue tv, int m, double delta);

/// Wasserstein template gap bound: sqrt(K * W1 + ln(2m/delta) / (2(m-1))),
/// where K is the Lipschitz constant of the squared gap at confidence delta/2.
BoundReport wpb_template(double lipschitz_k, DivergenceValue w1, int m, double delta);

/// Finite-class Wasserstein gap bound; wpb_template with
/// K = 8 G ln(4|H|/delta) / m.
BoundReport wpb_finite(int class_size, double loss_lipschitz, DivergenceValue w1, int m,
                       double delta);

/// Loss-gradient-UC Wasserstein gap bound; wpb_template with K = 2 uc ucg,
/// both evaluated at (m, delta/4).
BoundReport wpb_grad_uc(double uc_q, double ucg_q, DivergenceValue w1, int m, double delta);

/// Seeger-type finite-class TV gap bound through the refined-Pinsker
/// relaxation: with C = ln(4|H|/delta) TV + ln(4 sqrt(m)/delta),
///   sqrt(2 L_hat C / m) + 2 C / m.
BoundReport seeger_tv_finite(double emp_risk, int class_size, DivergenceValue tv, int m,
                             double delta);

/// Uniform-convergence bound for the bounded quadratic-loss linear
/// regression class (independent of the ball radius r):
///   sqrt(ln(6/delta)/(32 m))
///   + sqrt((d + 2 d sqrt(ln(3/delta)) + 2 ln(3/delta)) / (4 m))
///   + 8 max{ sqrt((5d + 2 ln(6/delta))/m), (5d + 2 ln(6/delta))/m }.
double uc_linreg(int m, double delta, int d);

/// Matching uniform-convergence bound for the loss gradient:
///   16 r max{ sqrt((5d + 2 ln(4/delta))/m), (5d + 2 ln(4/delta))/m }
///   + r sqrt((d + 2 d sqrt(ln(2/delta)) + 2 ln(2/delta)) / (4 m)).
double ucg_linreg(int m, double delta, int d, double r);

/// Explicit Wasserstein bound for the regression experiment:
///   jhat + sqrt(2 uc(m,delta/4) ucg(m,delta/4) W + ln(2m/delta)/(2(m-1))).
BoundReport wpb_linreg(double jhat, DivergenceValue w_bound, int m, double delta, int d,
                       double r);

/// Explicit KL bound for the regression experiment:
///   jhat + sqrt((KL(Q||P) + ln(m/delta)) / (2(m-1))).
/// Throws UndefinedValueError when either sigma is zero.
BoundReport klpb_linreg(double jhat, const GaussianMeasure& q, const GaussianMeasure& p,
                        int m, double delta);

}  // namespace pacbayes
