#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pacbayes/random.hpp"
#include "pacbayes/vecmath.hpp"

namespace pacbayes {

/// Isotropic Gaussian N(mean, sigma^2 I). sigma == 0 degenerates to a
/// point mass at the mean.
struct GaussianMeasure {
  GaussianMeasure(Vec mean_in, double sigma_in);

  std::size_t dim() const { return mean.size(); }

  Vec mean;
  double sigma;
};

/// Push-forward of an isotropic Gaussian under L2-ball projection.
struct ProjectedGaussianMeasure {
  ProjectedGaussianMeasure(GaussianMeasure base_in, double radius_in);

  std::size_t dim() const { return base.dim(); }

  GaussianMeasure base;
  double radius;
};

/// Point mass.
struct DiracMeasure {
  explicit DiracMeasure(Vec point_in);

  GaussianMeasure as_gaussian() const { return GaussianMeasure(point, 0.0); }

  Vec point;
};

/// Finite metric space (H, rho) given as a full distance matrix.
/// Construction validates symmetry, zero diagonal, non-negativity and the
/// triangle inequality over all triples (O(n^3), sizes here are small).
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::size_t n, std::vector<double> distances);

  std::size_t size() const { return size_; }
  double distance(std::size_t i, std::size_t j) const { return dist_[i * size_ + j]; }
  double max_distance() const { return max_distance_; }

 private:
  std::size_t size_;
  std::vector<double> dist_;  // row-major n x n
  double max_distance_ = 0.0;
};

/// Probability vector over the points of an associated FiniteMetricSpace.
struct DiscreteMeasure {
  explicit DiscreteMeasure(Vec weights_in);

  std::size_t size() const { return weights.size(); }

  Vec weights;
};

/// Euclidean projection onto the closed L2 ball of radius r. Idempotent
/// bitwise: a result is never rescaled again by a second application.
Vec project_ball(std::span<const double> v, double r);

/// Uniform sample from the closed L2 ball of radius r in dimension d
/// (Gaussian direction scaled by r * U^(1/d)).
Vec sample_uniform_ball(RandomSource& rng, std::size_t d, double r);

/// Sample from N(mean, sigma^2 I); sigma == 0 returns the mean exactly.
Vec sample_gaussian(RandomSource& rng, const GaussianMeasure& g);

}  // namespace pacbayes
