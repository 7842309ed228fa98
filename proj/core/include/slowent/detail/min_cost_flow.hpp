#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace slowent::detail {

/// Primal-dual min-cost flow with real capacities: Dijkstra on reduced
/// costs to update node potentials, then a Dinic blocking flow restricted to
/// zero-reduced-cost arcs. Initial arc costs must be nonnegative.
class MinCostFlow {
 public:
  static constexpr double infinite = std::numeric_limits<double>::infinity();

  explicit MinCostFlow(std::size_t nodes);

  /// Adds u -> v and its residual twin; returns the forward arc id.
  std::size_t add_arc(std::size_t u, std::size_t v, double capacity, double cost);

  /// Sends as much flow as possible from s to t at minimum cost and returns
  /// the total cost. Residual capacities below `capacity_tolerance` count as
  /// exhausted.
  double solve(std::size_t s, std::size_t t);

  double flow(std::size_t arc) const { return arcs_[arc ^ 1].residual; }
  double total_flow() const { return total_flow_; }

  static constexpr double capacity_tolerance = 1e-15;
  static constexpr double cost_tolerance = 1e-11;

 private:
  struct Arc {
    std::size_t to;
    double residual;
    double cost;
  };

  bool dijkstra(std::size_t s, std::size_t t);
  bool bfs_levels(std::size_t s, std::size_t t);
  double push(std::size_t u, std::size_t t, double limit);
  double reduced(std::size_t u, const Arc& a) const { return a.cost + potential_[u] - potential_[a.to]; }
  bool admissible(std::size_t u, const Arc& a) const {
    return a.residual > capacity_tolerance && reduced(u, a) <= cost_tolerance;
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<double> potential_;
  std::vector<double> dist_;
  std::vector<std::size_t> parent_arc_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
  double total_flow_ = 0.0;
};

}  // namespace slowent::detail
