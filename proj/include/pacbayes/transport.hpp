#pragma once

#include <span>

#include "pacbayes/vecmath.hpp"

namespace pacbayes {

struct TransportResult {
  double cost = 0.0;
  Matrix plan;  // optimal coupling, supply-by-demand
};

/// Solves the balanced transportation problem
///   min sum_ij plan_ij * cost_ij   s.t.  row sums = supply, col sums = demand
/// to optimality by successive shortest augmenting paths with node
/// potentials (an exact method; supports here are small).
///
/// Requires non-negative costs and sum(supply) == sum(demand) up to 1e-9.
TransportResult solve_transport(std::span<const double> supply,
                                std::span<const double> demand, const Matrix& cost);

}  // namespace pacbayes
