#include "pacbayes/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pacbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassEps = 1e-14;  // residual mass below this counts as settled

}  // namespace

TransportResult solve_transport(std::span<const double> supply,
                                std::span<const double> demand, const Matrix& cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (n == 0 || m == 0) throw std::invalid_argument("solve_transport: empty marginals");
  if (cost.rows() != n || cost.cols() != m) {
    throw std::invalid_argument("solve_transport: cost shape mismatch");
  }
  double supply_total = 0.0, demand_total = 0.0;
  for (double s : supply) {
    if (!(s >= 0.0)) throw std::invalid_argument("solve_transport: negative supply");
    supply_total += s;
  }
  for (double d : demand) {
    if (!(d >= 0.0)) throw std::invalid_argument("solve_transport: negative demand");
    demand_total += d;
  }
  if (std::abs(supply_total - demand_total) > 1e-9) {
    throw std::invalid_argument("solve_transport: marginals must balance");
  }

  TransportResult result;
  result.plan = Matrix(n, m, 0.0);

  std::vector<double> rest_supply(supply.begin(), supply.end());
  std::vector<double> rest_demand(demand.begin(), demand.end());
  // Node potentials keep reduced costs non-negative across augmentations.
  std::vector<double> pot_supply(n, 0.0), pot_demand(m, 0.0);

  // Dijkstra workspaces over the 2-layer residual graph. Dense scans beat a
  // heap at these sizes.
  std::vector<double> dist_s(n), dist_d(m);
  std::vector<char> done_s(n), done_d(m);
  std::vector<std::size_t> parent_d(m);  // supply node feeding demand j on the path
  std::vector<std::size_t> parent_s(n);  // demand node feeding supply i (backward arc)

  auto remaining = [&]() {
    double total = 0.0;
    for (double s : rest_supply) total += s;
    return total;
  };

  const std::size_t max_augmentations = 16 * (n + m) * (n + m) + 64;
  std::size_t augmentations = 0;
  while (remaining() > kMassEps) {
    if (++augmentations > max_augmentations) {
      throw std::logic_error("solve_transport: augmentation cap exceeded");
    }
    std::fill(dist_s.begin(), dist_s.end(), kInf);
    std::fill(dist_d.begin(), dist_d.end(), kInf);
    std::fill(done_s.begin(), done_s.end(), 0);
    std::fill(done_d.begin(), done_d.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (rest_supply[i] > kMassEps) dist_s[i] = 0.0;
    }

    // Alternate dense Dijkstra over supply and demand layers.
    std::size_t sink = m;
    while (true) {
      // Closest unfinished node in either layer.
      double best = kInf;
      bool on_supply = true;
      std::size_t best_idx = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done_s[i] && dist_s[i] < best) { best = dist_s[i]; best_idx = i; on_supply = true; }
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (!done_d[j] && dist_d[j] < best) { best = dist_d[j]; best_idx = j; on_supply = false; }
      }
      if (best == kInf) break;
      if (on_supply) {
        const std::size_t i = best_idx;
        done_s[i] = 1;
        for (std::size_t j = 0; j < m; ++j) {
          if (done_d[j]) continue;
          // forward arc i -> j, reduced cost clamped against rounding
          const double rc = std::max(0.0, cost(i, j) + pot_supply[i] - pot_demand[j]);
          if (dist_s[i] + rc < dist_d[j]) {
            dist_d[j] = dist_s[i] + rc;
            parent_d[j] = i;
          }
        }
      } else {
        const std::size_t j = best_idx;
        done_d[j] = 1;
        if (rest_demand[j] > kMassEps) { sink = j; break; }  // settled layers suffice
        for (std::size_t i = 0; i < n; ++i) {
          if (done_s[i] || result.plan(i, j) <= 0.0) continue;
          // backward arc j -> i along existing flow
          const double rc = std::max(0.0, -cost(i, j) - pot_supply[i] + pot_demand[j]);
          if (dist_d[j] + rc < dist_s[i]) {
            dist_s[i] = dist_d[j] + rc;
            parent_s[i] = j;
          }
        }
      }
    }
    if (sink == m) throw std::logic_error("solve_transport: no augmenting path");

    const double sink_dist = dist_d[sink];
    // Standard potential update capped at the sink distance.
    for (std::size_t i = 0; i < n; ++i) {
      pot_supply[i] += std::min(dist_s[i], sink_dist);
    }
    for (std::size_t j = 0; j < m; ++j) {
      pot_demand[j] += std::min(dist_d[j], sink_dist);
    }

    // Walk back to a source, collecting the bottleneck.
    double delta = rest_demand[sink];
    {
      std::size_t j = sink;
      while (true) {
        const std::size_t i = parent_d[j];
        if (dist_s[i] == 0.0 && rest_supply[i] > kMassEps) {
          delta = std::min(delta, rest_supply[i]);
          break;
        }
        j = parent_s[i];
        delta = std::min(delta, result.plan(i, j));
      }
    }
    // Apply the augmentation.
    {
      std::size_t j = sink;
      while (true) {
        const std::size_t i = parent_d[j];
        result.plan(i, j) += delta;
        if (dist_s[i] == 0.0 && rest_supply[i] > kMassEps) {
          rest_supply[i] -= delta;
          rest_demand[sink] -= delta;
          break;
        }
        const std::size_t j_prev = parent_s[i];
        result.plan(i, j_prev) -= delta;
        j = j_prev;
      }
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) total += result.plan(i, j) * cost(i, j);
  }
  result.cost = total;
  return result;
}

}  // namespace pacbayes
