#include "pacbayes/divergences.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pacbayes/errors.hpp"
#include "pacbayes/transport.hpp"

namespace pacbayes {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_same_dim(const GaussianMeasure& q, const GaussianMeasure& p, const char* who) {
  if (q.dim() != p.dim()) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
}

}  // namespace

const char* to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::KL: return "kl";
    case DivergenceKind::BernoulliKL: return "bernoulli-kl";
    case DivergenceKind::TV: return "tv";
    case DivergenceKind::W1Exact: return "w1-exact";
    case DivergenceKind::W2Gaussian: return "w2-gaussian";
    case DivergenceKind::W1ProjGaussUpper: return "w1-proj-gauss-upper";
  }
  return "unknown";
}

DivergenceValue kl_gaussian_isotropic(const GaussianMeasure& q, const GaussianMeasure& p) {
  require_same_dim(q, p, "kl_gaussian_isotropic");
  if (q.sigma == 0.0 || p.sigma == 0.0) {
    throw UndefinedValueError("kl_gaussian_isotropic: undefined for sigma = 0");
  }
  const double d = static_cast<double>(q.dim());
  const double mean_term = squared_distance(q.mean, p.mean) / (2.0 * p.sigma * p.sigma);
  const double ratio = q.sigma * q.sigma / (2.0 * p.sigma * p.sigma);
  const double value = mean_term + d * (std::log(p.sigma / q.sigma) + ratio - 0.5);
  return {value, DivergenceKind::KL};
}

DivergenceValue kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("kl_bernoulli: arguments must lie in [0,1]");
  }
  if (q == 0.0 || q == 1.0) {
    if (p == q) return {0.0, DivergenceKind::BernoulliKL};
    throw UndefinedValueError("kl_bernoulli: undefined for q in {0,1} with p != q");
  }
  if (p == q) return {0.0, DivergenceKind::BernoulliKL};
  double value = 0.0;
  if (p > 0.0) value += p * std::log(p / q);
  if (p < 1.0) value += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return {value, DivergenceKind::BernoulliKL};
}

double kl_bernoulli_inverse_upper(double p, double eps) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("kl_bernoulli_inverse_upper: p in [0,1]");
  if (!(eps >= 0.0)) throw std::invalid_argument("kl_bernoulli_inverse_upper: eps must be >= 0");
  if (eps == 0.0 || p == 1.0) return p;
  // kl(p || q) is increasing in q on [p, 1); kl(p || 1) = +inf for p < 1.
  auto excess = [p, eps](double q) {
    if (q >= 1.0) return 1.0;  // beyond budget
    return kl_bernoulli(p, q).value - eps;
  };
  double lo = p, hi = 1.0;
  if (excess(hi) <= 0.0) return hi;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

DivergenceValue tv_discrete(const DiscreteMeasure& q, const DiscreteMeasure& p) {
  if (q.size() != p.size()) throw std::invalid_argument("tv_discrete: support size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += std::abs(q.weights[i] - p.weights[i]);
  return {0.5 * sum, DivergenceKind::TV};
}

DivergenceValue w1_discrete_exact(const DiscreteMeasure& q, const DiscreteMeasure& p,
                                  const FiniteMetricSpace& space) {
  if (q.size() != space.size() || p.size() != space.size()) {
    throw std::invalid_argument("w1_discrete_exact: measures must live on the space");
  }
  Matrix cost(space.size(), space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = 0; j < space.size(); ++j) cost(i, j) = space.distance(i, j);
  }
  return {solve_transport(q.weights, p.weights, cost).cost, DivergenceKind::W1Exact};
}

DivergenceValue w2_gaussian(const GaussianMeasure& q, const GaussianMeasure& p) {
  require_same_dim(q, p, "w2_gaussian");
  const double d = static_cast<double>(q.dim());
  const double ds = q.sigma - p.sigma;
  return {std::sqrt(squared_distance(q.mean, p.mean) + d * ds * ds),
          DivergenceKind::W2Gaussian};
}

double erfc(double x) {
  // std::erfc on glibc is well within the 1e-12 relative accuracy needed
  // here and underflows to 0 for large arguments; tests check it against an
  // independent series / continued-fraction reference.
  return std::erfc(x);
}

namespace {

// sqrt(pi/2) * sigma * erfc((r - s) / (sqrt(2) sigma)); 0 at sigma = 0.
double projection_tail_term(double r, double s, double sigma) {
  if (sigma == 0.0) return 0.0;
  return std::sqrt(kPi / 2.0) * sigma * erfc((r - s) / (std::sqrt(2.0) * sigma));
}

}  // namespace

DivergenceValue w1_projected_gaussian_upper(const ProjectedGaussianMeasure& q,
                                            const ProjectedGaussianMeasure& p) {
  require_same_dim(q.base, p.base, "w1_projected_gaussian_upper");
  if (q.radius != p.radius) {
    throw std::invalid_argument("w1_projected_gaussian_upper: radii must match");
  }
  const double r = q.radius;
  const double d = static_cast<double>(q.dim());
  const double s_q2 = squared_norm(q.base.mean) + d * q.base.sigma * q.base.sigma;
  const double s_p2 = squared_norm(p.base.mean) + d * p.base.sigma * p.base.sigma;
  if (r * r < s_q2) {
    throw PreconditionError(
        "w1_projected_gaussian_upper: r^2 >= ||mu_Q||^2 + d sigma_Q^2 required (Q violates)");
  }
  if (r * r < s_p2) {
    throw PreconditionError(
        "w1_projected_gaussian_upper: r^2 >= ||mu_P||^2 + d sigma_P^2 required (P violates)");
  }
  const double w2 = w2_gaussian(q.base, p.base).value;
  const double value = w2 + projection_tail_term(r, std::sqrt(s_q2), q.base.sigma) +
                       projection_tail_term(r, std::sqrt(s_p2), p.base.sigma);
  return {value, DivergenceKind::W1ProjGaussUpper};
}

}  // namespace pacbayes
