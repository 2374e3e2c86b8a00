#include "pacbayes/measures.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pacbayes {

GaussianMeasure::GaussianMeasure(Vec mean_in, double sigma_in)
    : mean(std::move(mean_in)), sigma(sigma_in) {
  if (mean.empty()) throw std::invalid_argument("GaussianMeasure: dimension must be >= 1");
  if (!all_finite(mean)) throw std::invalid_argument("GaussianMeasure: mean must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("GaussianMeasure: sigma must be finite and >= 0");
  }
}

ProjectedGaussianMeasure::ProjectedGaussianMeasure(GaussianMeasure base_in, double radius_in)
    : base(std::move(base_in)), radius(radius_in) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ProjectedGaussianMeasure: radius must be finite and > 0");
  }
}

DiracMeasure::DiracMeasure(Vec point_in) : point(std::move(point_in)) {
  if (point.empty()) throw std::invalid_argument("DiracMeasure: dimension must be >= 1");
  if (!all_finite(point)) throw std::invalid_argument("DiracMeasure: point must be finite");
}

FiniteMetricSpace::FiniteMetricSpace(std::size_t n, std::vector<double> distances)
    : size_(n), dist_(std::move(distances)) {
  if (n == 0) throw std::invalid_argument("FiniteMetricSpace: size must be >= 1");
  if (dist_.size() != n * n) {
    throw std::invalid_argument("FiniteMetricSpace: distance matrix must be n*n");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (dist_[i * n + i] != 0.0) {
      throw std::invalid_argument("FiniteMetricSpace: diagonal must be zero");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist_[i * n + j];
      if (!std::isfinite(d) || d < 0.0) {
        throw std::invalid_argument("FiniteMetricSpace: distances must be finite and >= 0");
      }
      if (d != dist_[j * n + i]) {
        throw std::invalid_argument("FiniteMetricSpace: distance matrix must be symmetric");
      }
      max_distance_ = std::max(max_distance_, d);
    }
  }
  // Slack absorbs rounding in distances computed from coordinates.
  const double eps = 1e-12 * std::max(1.0, max_distance_);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (dist_[i * n + j] > dist_[i * n + k] + dist_[k * n + j] + eps) {
          throw std::invalid_argument(
              "FiniteMetricSpace: triangle inequality violated at (" + std::to_string(i) +
              "," + std::to_string(j) + "," + std::to_string(k) + ")");
        }
      }
    }
  }
}

DiscreteMeasure::DiscreteMeasure(Vec weights_in) : weights(std::move(weights_in)) {
  if (weights.empty()) throw std::invalid_argument("DiscreteMeasure: support must be non-empty");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("DiscreteMeasure: weights must be finite and >= 0");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteMeasure: weights must sum to 1 (got " +
                                std::to_string(total) + ")");
  }
}

Vec project_ball(std::span<const double> v, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("project_ball: radius must be finite and > 0");
  }
  if (!all_finite(v)) throw std::invalid_argument("project_ball: input must be finite");
  Vec result(v.begin(), v.end());
  const double n = norm(result);
  if (n <= r) return result;
  double scale = r / n;
  for (double& x : result) x *= scale;
  // Rounding can leave the scaled norm a few ulps above r; nudge down so a
  // second projection is a bitwise no-op.
  while (norm(result) > r) {
    for (double& x : result) x *= (1.0 - 0x1.0p-52);
  }
  return result;
}

Vec sample_uniform_ball(RandomSource& rng, std::size_t d, double r) {
  if (d == 0) throw std::invalid_argument("sample_uniform_ball: dimension must be >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("sample_uniform_ball: radius must be finite and > 0");
  }
  Vec direction(d);
  for (double& x : direction) x = rng.normal();
  const double n = norm(direction);
  const double radius = r * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  if (n == 0.0) return Vec(d, 0.0);  // probability-zero corner
  for (double& x : direction) x *= radius / n;
  // The scaled norm can exceed r only by rounding; clamp to keep the
  // support invariant exact.
  if (norm(direction) > r) return project_ball(direction, r);
  return direction;
}

Vec sample_gaussian(RandomSource& rng, const GaussianMeasure& g) {
  Vec sample = g.mean;
  if (g.sigma == 0.0) return sample;
  for (double& x : sample) x += g.sigma * rng.normal();
  return sample;
}

}  // namespace pacbayes
