#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace slowent::detail {

/// Uncapacitated min-cost flow on the N-cube with unit edge costs, i.e. the
/// earth mover's distance for the Hamming metric. The graph is built once
/// and only the source/sink capacities change between solves. Primal-dual:
/// integer reduced costs allow a bucket-queue Dijkstra, followed by a
/// blocking flow on the zero-reduced-cost arcs.
class HypercubeFlow {
 public:
  explicit HypercubeFlow(unsigned n);

  /// excess[v] = P(v) - Q(v); returns the total cost (unnormalized).
  double solve(std::span<const double> excess);

 private:
  bool shortest_paths();
  bool levels();
  double push(std::uint32_t u, double limit);
  bool admissible(std::uint32_t u, std::uint32_t arc) const {
    return residual_[arc] > kTolerance && cost_[arc] + potential_[u] - potential_[to_[arc]] == 0;
  }

  static constexpr double kTolerance = 1e-15;

  unsigned n_;
  std::uint32_t source_;
  std::uint32_t sink_;
  std::vector<std::uint32_t> first_;  // CSR offsets
  std::vector<std::uint32_t> arcs_;   // arc ids per node
  std::vector<std::uint32_t> to_;
  std::vector<int> cost_;
  std::vector<double> residual_;
  std::vector<double> base_residual_;
  std::vector<std::uint32_t> source_arc_;  // per vertex
  std::vector<std::uint32_t> sink_arc_;
  std::vector<int> potential_;
  std::vector<int> dist_;
  std::vector<int> level_;
  std::vector<std::uint32_t> cursor_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::vector<std::uint32_t> queue_;
};

}  // namespace slowent::detail
