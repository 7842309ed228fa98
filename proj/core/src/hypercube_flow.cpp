#include "slowent/detail/hypercube_flow.hpp"

#include <algorithm>
#include <limits>

namespace slowent::detail {
namespace {
constexpr int kUnreached = std::numeric_limits<int>::max();
constexpr double kInfinite = std::numeric_limits<double>::infinity();
}  // namespace

HypercubeFlow::HypercubeFlow(unsigned n) : n_(n) {
  const std::uint32_t vertices = std::uint32_t{1} << n;
  source_ = vertices;
  sink_ = vertices + 1;
  const std::uint32_t nodes = vertices + 2;

  std::vector<std::vector<std::uint32_t>> adjacency(nodes);
  auto add = [&](std::uint32_t u, std::uint32_t v, double cap, int cost) {
    const auto id = static_cast<std::uint32_t>(to_.size());
    to_.push_back(v);
    cost_.push_back(cost);
    base_residual_.push_back(cap);
    to_.push_back(u);
    cost_.push_back(-cost);
    base_residual_.push_back(0.0);
    adjacency[u].push_back(id);
    adjacency[v].push_back(id + 1);
    return id;
  };
  source_arc_.resize(vertices);
  sink_arc_.resize(vertices);
  for (std::uint32_t v = 0; v < vertices; ++v) {
    source_arc_[v] = add(source_, v, 0.0, 0);
    sink_arc_[v] = add(v, sink_, 0.0, 0);
  }
  for (std::uint32_t v = 0; v < vertices; ++v) {
    for (unsigned b = 0; b < n; ++b) add(v, v ^ (std::uint32_t{1} << b), kInfinite, 1);
  }
  first_.assign(nodes + 1, 0);
  for (std::uint32_t u = 0; u < nodes; ++u) {
    first_[u + 1] = first_[u] + static_cast<std::uint32_t>(adjacency[u].size());
    arcs_.insert(arcs_.end(), adjacency[u].begin(), adjacency[u].end());
  }
  residual_.resize(to_.size());
  potential_.resize(nodes);
  dist_.resize(nodes);
  level_.resize(nodes);
  cursor_.resize(nodes);
  queue_.reserve(nodes);
}

bool HypercubeFlow::shortest_paths() {
  std::fill(dist_.begin(), dist_.end(), kUnreached);
  for (auto& b : buckets_) b.clear();
  dist_[source_] = 0;
  if (buckets_.empty()) buckets_.resize(1);
  buckets_[0].push_back(source_);
  for (std::size_t d = 0; d < buckets_.size(); ++d) {
    for (std::size_t i = 0; i < buckets_[d].size(); ++i) {
      const std::uint32_t u = buckets_[d][i];
      if (dist_[u] != static_cast<int>(d)) continue;
      for (std::uint32_t k = first_[u]; k < first_[u + 1]; ++k) {
        const std::uint32_t a = arcs_[k];
        if (residual_[a] <= kTolerance) continue;
        const std::uint32_t v = to_[a];
        const int nd = static_cast<int>(d) + cost_[a] + potential_[u] - potential_[v];
        if (nd < dist_[v]) {
          dist_[v] = nd;
          if (static_cast<std::size_t>(nd) >= buckets_.size()) buckets_.resize(static_cast<std::size_t>(nd) + 1);
          buckets_[static_cast<std::size_t>(nd)].push_back(v);
        }
      }
    }
  }
  if (dist_[sink_] == kUnreached) return false;
  // Vertices beyond the sink's distance keep admissibility consistent when
  // capped at that distance.
  const int cap = dist_[sink_];
  for (std::size_t v = 0; v < potential_.size(); ++v) potential_[v] += std::min(dist_[v], cap);
  return true;
}

bool HypercubeFlow::levels() {
  std::fill(level_.begin(), level_.end(), -1);
  queue_.clear();
  level_[source_] = 0;
  queue_.push_back(source_);
  for (std::size_t i = 0; i < queue_.size(); ++i) {
    const std::uint32_t u = queue_[i];
    for (std::uint32_t k = first_[u]; k < first_[u + 1]; ++k) {
      const std::uint32_t a = arcs_[k];
      const std::uint32_t v = to_[a];
      if (level_[v] < 0 && admissible(u, a)) {
        level_[v] = level_[u] + 1;
        queue_.push_back(v);
      }
    }
  }
  return level_[sink_] >= 0;
}

double HypercubeFlow::push(std::uint32_t u, double limit) {
  if (u == sink_) return limit;
  for (std::uint32_t& k = cursor_[u]; k < first_[u + 1]; ++k) {
    const std::uint32_t a = arcs_[k];
    const std::uint32_t v = to_[a];
    if (level_[v] != level_[u] + 1 || !admissible(u, a)) continue;
    const double pushed = push(v, std::min(limit, residual_[a]));
    if (pushed > 0.0) {
      residual_[a] -= pushed;
      residual_[a ^ 1] += pushed;
      return pushed;
    }
  }
  return 0.0;
}

double HypercubeFlow::solve(std::span<const double> excess) {
  residual_ = base_residual_;
  std::fill(potential_.begin(), potential_.end(), 0);
  bool any = false;
  for (std::uint32_t v = 0; v < source_; ++v) {
    if (excess[v] > kTolerance) {
      residual_[source_arc_[v]] = excess[v];
      any = true;
    } else if (excess[v] < -kTolerance) {
      residual_[sink_arc_[v]] = -excess[v];
    }
  }
  if (!any) return 0.0;
  while (shortest_paths()) {
    double phase = 0.0;
    while (levels()) {
      for (std::uint32_t u = 0; u < cursor_.size(); ++u) cursor_[u] = first_[u];
      for (double f = push(source_, kInfinite); f > 0.0; f = push(source_, kInfinite)) phase += f;
    }
    if (phase == 0.0) break;
  }
  double cost = 0.0;
  for (std::uint32_t a = 0; a < to_.size(); a += 2) {
    if (cost_[a] != 0) cost += residual_[a + 1] * cost_[a];
  }
  return cost;
}

}  // namespace slowent::detail
