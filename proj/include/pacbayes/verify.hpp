#pragma once

#include <cstdint>
#include <span>

#include "pacbayes/linreg.hpp"
#include "pacbayes/measures.hpp"
#include "pacbayes/random.hpp"
#include "pacbayes/vecmath.hpp"

namespace pacbayes::verify {

/// Outcome of a Monte-Carlo validity run. pass holds when
/// violations/trials <= delta + slack, with slack a two-sigma binomial
/// allowance recorded alongside.
struct ValidityReport {
  long long trials = 0;
  long long violations = 0;
  double delta = 0.0;
  double slack = 0.0;
  bool pass = false;

  double rate() const {
    return trials > 0 ? static_cast<double>(violations) / static_cast<double>(trials) : 0.0;
  }
};

ValidityReport make_validity_report(long long trials, long long violations, double delta);

/// Exact minimal transport cost by enumerating every basic feasible
/// solution (spanning-tree basis) of the coupling polytope. Supports
/// sizes up to 4; the reference the fast solver is tested against.
double w1_bruteforce_oracle(const DiscreteMeasure& q, const DiscreteMeasure& p,
                            const FiniteMetricSpace& space);

/// Finite learning problem with exactly computable expected risks: a metric
/// space of hypotheses, a loss table over a finite data domain, and the
/// true distribution over that domain.
struct FiniteClassScenario {
  FiniteMetricSpace space;
  Matrix loss;        // hypotheses x data points, values in [0,1]
  Vec data_weights;   // true distribution over data points
  double loss_lipschitz = 1.0;  // G s.t. |loss(h,z)-loss(h',z)| <= G rho(h,h')
};

/// Shipped default: |H| = 8 hypotheses on a line, 16-point data domain,
/// loss(h, z) = |h - z| (1-Lipschitz), non-uniform data distribution.
FiniteClassScenario default_finite_class_scenario();

/// Sharp Lipschitz constant of the squared generalization gap,
///   max_{h != h'} |Delta^2(h) - Delta^2(h')| / rho(h, h'),
/// with the expected risk computed exactly from dist_weights and the
/// empirical risk from the sample given as an index multiset.
double lipschitz_constant_bruteforce(const FiniteMetricSpace& space, const Matrix& loss_table,
                                     std::span<const std::size_t> data_indices,
                                     std::span<const double> dist_weights);

/// Checks the finite-class Lipschitz lemma: over `trials` independent
/// samples of size m, counts how often the sharp constant exceeds
/// (8 G / m) ln(2|H|/delta).
ValidityReport lemma_lipschitz_validity(const RandomSource& rng,
                                        const FiniteClassScenario& scenario, int trials,
                                        int m, double delta, int threads = 1);

enum class BoundSelector { TVPB, KLPBClassic };

/// Monte-Carlo validity of a bound on the finite-class scenario: draws
/// datasets, forms the Gibbs posterior q proportional to
/// exp(-beta * empirical risk) (beta = 0 reproduces the prior), and counts
/// trials where the true gap exceeds the bound. delta may be 1 (vacuous).
ValidityReport bound_validity_mc(const RandomSource& rng, const FiniteClassScenario& scenario,
                                 BoundSelector bound, int trials, int m, double delta,
                                 int threads = 1, double beta = 1.0);

/// Max relative error between the analytic objective gradient and central
/// finite differences (step 1e-6) over `points` random feasible posteriors.
double gradient_check(const RandomSource& rng, Objective which, int points);

/// Same check for the empirical-risk term alone (exactly quadratic).
double empirical_risk_gradient_check(const RandomSource& rng, int points);

struct RiskCrosscheck {
  double closed_form = 0.0;
  double projected_mc = 0.0;
  double diff = 0.0;
};

/// Monte-Carlo posterior risk with the ball projection applied to every
/// sampled hypothesis, against the unprojected closed form the experiment
/// uses. Quantifies the projection's effect once sigma_q stops being small
/// relative to the ball radius.
RiskCrosscheck projected_risk_crosscheck(const RandomSource& rng, const RegressionTask& task,
                                         const PosteriorParams& post, int n_mc, double r);

}  // namespace pacbayes::verify
