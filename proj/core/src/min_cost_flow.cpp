#include "slowent/detail/min_cost_flow.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>

namespace slowent::detail {

MinCostFlow::MinCostFlow(std::size_t nodes)
    : out_(nodes), potential_(nodes, 0.0), dist_(nodes), parent_arc_(nodes), level_(nodes),
      cursor_(nodes) {}

std::size_t MinCostFlow::add_arc(std::size_t u, std::size_t v, double capacity, double cost) {
  const std::size_t id = arcs_.size();
  arcs_.push_back({v, capacity, cost});
  arcs_.push_back({u, 0.0, -cost});
  out_[u].push_back(id);
  out_[v].push_back(id + 1);
  return id;
}

bool MinCostFlow::dijkstra(std::size_t s, std::size_t t) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::fill(dist_.begin(), dist_.end(), infinite);
  std::fill(parent_arc_.begin(), parent_arc_.end(), none);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist_[s] = 0.0;
  heap.push({0.0, s});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist_[u]) continue;
    for (auto id : out_[u]) {
      const Arc& a = arcs_[id];
      if (a.residual <= capacity_tolerance) continue;
      // Rounding can leave reduced costs a hair below zero.
      const double nd = d + std::max(0.0, reduced(u, a));
      if (nd < dist_[a.to]) {
        dist_[a.to] = nd;
        parent_arc_[a.to] = id;
        heap.push({nd, a.to});
      }
    }
  }
  if (dist_[t] == infinite) return false;
  for (std::size_t v = 0; v < potential_.size(); ++v) {
    if (dist_[v] < infinite) potential_[v] += dist_[v];
  }
  return true;
}

bool MinCostFlow::bfs_levels(std::size_t s, std::size_t t) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<std::size_t> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (auto id : out_[u]) {
      const Arc& a = arcs_[id];
      if (level_[a.to] < 0 && admissible(u, a)) {
        level_[a.to] = level_[u] + 1;
        q.push(a.to);
      }
    }
  }
  return level_[t] >= 0;
}

double MinCostFlow::push(std::size_t u, std::size_t t, double limit) {
  if (u == t) return limit;
  for (std::size_t& i = cursor_[u]; i < out_[u].size(); ++i) {
    const std::size_t id = out_[u][i];
    Arc& a = arcs_[id];
    if (level_[a.to] != level_[u] + 1 || !admissible(u, a)) continue;
    const double pushed = push(a.to, t, std::min(limit, a.residual));
    if (pushed > 0.0) {
      a.residual -= pushed;
      arcs_[id ^ 1].residual += pushed;
      return pushed;
    }
  }
  return 0.0;
}

double MinCostFlow::solve(std::size_t s, std::size_t t) {
  while (dijkstra(s, t)) {
    double phase_flow = 0.0;
    while (bfs_levels(s, t)) {
      std::fill(cursor_.begin(), cursor_.end(), 0);
      for (double f = push(s, t, infinite); f > 0.0; f = push(s, t, infinite)) phase_flow += f;
    }
    if (phase_flow == 0.0) {
      // Tolerances hid the shortest path from the admissible graph; push
      // along the Dijkstra tree instead.
      double bottleneck = infinite;
      for (std::size_t v = t; v != s; v = arcs_[parent_arc_[v] ^ 1].to) {
        bottleneck = std::min(bottleneck, arcs_[parent_arc_[v]].residual);
      }
      for (std::size_t v = t; v != s; v = arcs_[parent_arc_[v] ^ 1].to) {
        arcs_[parent_arc_[v]].residual -= bottleneck;
        arcs_[parent_arc_[v] ^ 1].residual += bottleneck;
      }
      phase_flow = bottleneck;
    }
    total_flow_ += phase_flow;
  }
  double cost = 0.0;
  for (std::size_t id = 0; id < arcs_.size(); id += 2) {
    const double f = arcs_[id + 1].residual;
    if (f > 0.0) cost += f * arcs_[id].cost;
  }
  return cost;
}

}  // namespace slowent::detail
