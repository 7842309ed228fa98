#include "slowent/transport.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "slowent/detail/hypercube_flow.hpp"
#include "slowent/detail/min_cost_flow.hpp"
#include "slowent/error.hpp"

namespace slowent {
namespace {

void require_same_length(const NameDistribution& p, const NameDistribution& q) {
  if (p.word_length() != q.word_length()) {
    throw LengthMismatch("dbar_dist: name lengths " + std::to_string(p.word_length()) + " and " +
                         std::to_string(q.word_length()) + " differ");
  }
}

std::uint64_t word_index(const BinaryWord& w) { return w.window(0, w.size()); }

}  // namespace

NameDistribution::NameDistribution(std::vector<BinaryWord> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty()) throw PreconditionError("NameDistribution: empty support");
  if (support_.size() != probs_.size()) {
    throw LengthMismatch("NameDistribution: support and probabilities differ in count");
  }
  const std::size_t n = support_.front().size();
  std::unordered_map<BinaryWord, int, BinaryWordHash> seen;
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i].size() != n) throw LengthMismatch("NameDistribution: words differ in length");
    if (!(probs_[i] >= 0.0)) throw PreconditionError("NameDistribution: negative probability");
    if (!seen.emplace(support_[i], 0).second) {
      throw PreconditionError("NameDistribution: repeated support word " + support_[i].to_string());
    }
    total += probs_[i];
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw PreconditionError("NameDistribution: probabilities must sum to 1");
  }
}

NameDistribution NameDistribution::point_mass(BinaryWord w) {
  std::vector<BinaryWord> s;
  s.push_back(std::move(w));
  return NameDistribution(std::move(s), {1.0});
}

NameDistribution NameDistribution::uniform(std::vector<BinaryWord> support) {
  if (support.empty()) throw PreconditionError("NameDistribution: empty support");
  std::vector<double> probs(support.size(), 1.0 / static_cast<double>(support.size()));
  return NameDistribution(std::move(support), std::move(probs));
}

NameDistribution NameDistribution::empirical(std::span<const BinaryWord> names) {
  if (names.empty()) throw PreconditionError("NameDistribution: no names");
  std::unordered_map<BinaryWord, std::size_t, BinaryWordHash> slot;
  std::vector<BinaryWord> support;
  std::vector<double> counts;
  for (const auto& w : names) {
    auto [it, inserted] = slot.emplace(w, support.size());
    if (inserted) {
      support.push_back(w);
      counts.push_back(0.0);
    }
    counts[it->second] += 1.0;
  }
  for (auto& c : counts) c /= static_cast<double>(names.size());
  return NameDistribution(std::move(support), std::move(counts));
}

NameDistribution NameDistribution::mixture(const NameDistribution& p, const NameDistribution& q,
                                           double lambda) {
  require_same_length(p, q);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("mixture: lambda must lie in [0, 1]");
  std::unordered_map<BinaryWord, std::size_t, BinaryWordHash> slot;
  std::vector<BinaryWord> support;
  std::vector<double> probs;
  auto add = [&](const NameDistribution& d, double scale) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      auto [it, inserted] = slot.emplace(d.support()[i], support.size());
      if (inserted) {
        support.push_back(d.support()[i]);
        probs.push_back(0.0);
      }
      probs[it->second] += scale * d.probs()[i];
    }
  };
  add(p, lambda);
  add(q, 1.0 - lambda);
  return NameDistribution(std::move(support), std::move(probs));
}

double dbar_dist_bipartite(const NameDistribution& p, const NameDistribution& q) {
  require_same_length(p, q);
  const std::size_t m = p.size();
  const std::size_t k = q.size();
  const double n = static_cast<double>(p.word_length());
  // Nodes: source, P atoms, Q atoms, sink.
  const std::size_t source = 0;
  const std::size_t sink = m + k + 1;
  detail::MinCostFlow flow(m + k + 2);
  for (std::size_t i = 0; i < m; ++i) flow.add_arc(source, 1 + i, p.probs()[i], 0.0);
  for (std::size_t j = 0; j < k; ++j) flow.add_arc(1 + m + j, sink, q.probs()[j], 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double c = static_cast<double>(mismatch_count(p.support()[i], q.support()[j])) / n;
      flow.add_arc(1 + i, 1 + m + j, detail::MinCostFlow::infinite, c);
    }
  }
  return flow.solve(source, sink);
}

double hypercube_transport(std::span<const double> excess, unsigned n) {
  if (n == 0 || n > 12) throw SizeError("hypercube_transport: N must lie in [1, 12]");
  if (excess.size() != (std::size_t{1} << n)) {
    throw LengthMismatch("hypercube_transport: excess must have 2^N entries");
  }
  // One reusable graph per thread and dimension.
  thread_local std::vector<std::unique_ptr<detail::HypercubeFlow>> cache(13);
  if (!cache[n]) cache[n] = std::make_unique<detail::HypercubeFlow>(n);
  return cache[n]->solve(excess) / static_cast<double>(n);
}

double dbar_dist_hypercube(const NameDistribution& p, const NameDistribution& q) {
  require_same_length(p, q);
  const auto n = static_cast<unsigned>(p.word_length());
  if (n > 12) throw SizeError("dbar_dist_hypercube: N must be at most 12");
  std::vector<double> excess(std::size_t{1} << n, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) excess[word_index(p.support()[i])] += p.probs()[i];
  for (std::size_t j = 0; j < q.size(); ++j) excess[word_index(q.support()[j])] -= q.probs()[j];
  return hypercube_transport(excess, n);
}

double dbar_dist(const NameDistribution& p, const NameDistribution& q) {
  require_same_length(p, q);
  if (p.size() + q.size() > dbar_exact_support_limit) {
    throw SizeError("dbar_dist: supports hold " + std::to_string(p.size() + q.size()) +
                    " atoms combined (limit " + std::to_string(dbar_exact_support_limit) +
                    "); use dbar_dist_greedy for an upper bound");
  }
  return p.word_length() <= 10 ? dbar_dist_hypercube(p, q) : dbar_dist_bipartite(p, q);
}

double dbar_dist_greedy(const NameDistribution& p, const NameDistribution& q) {
  require_same_length(p, q);
  const double n = static_cast<double>(p.word_length());
  auto sorted_order = [](const NameDistribution& d) {
    std::vector<std::string> keys;
    for (const auto& w : d.support()) keys.push_back(w.to_string());
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return idx;
  };
  const auto pi = sorted_order(p);
  const auto qi = sorted_order(q);
  const std::size_t m = p.size();
  const std::size_t k = q.size();
  std::vector<double> cost(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      cost[i * k + j] =
          static_cast<double>(mismatch_count(p.support()[pi[i]], q.support()[qi[j]])) / n;
    }
  }
  // Northwest corner.
  std::vector<double> plan(m * k, 0.0);
  {
    std::size_t i = 0, j = 0;
    double supply = p.probs()[pi[0]];
    double demand = q.probs()[qi[0]];
    while (i < m && j < k) {
      const double f = std::min(supply, demand);
      plan[i * k + j] += f;
      supply -= f;
      demand -= f;
      if (supply <= demand) {
        if (++i < m) supply = p.probs()[pi[i]];
      } else {
        if (++j < k) demand = q.probs()[qi[j]];
      }
    }
  }
  // 2-exchange: move mass from (a,b),(c,d) to (a,d),(c,b) when cheaper.
  constexpr double kGain = 1e-15;
  for (int pass = 0; pass < 200; ++pass) {
    bool improved = false;
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < plan.size(); ++c) {
      if (plan[c] > 0.0) cells.push_back(c);
    }
    for (std::size_t x = 0; x < cells.size(); ++x) {
      for (std::size_t y = x + 1; y < cells.size(); ++y) {
        const std::size_t c1 = cells[x], c2 = cells[y];
        if (plan[c1] <= 0.0 || plan[c2] <= 0.0) continue;
        const std::size_t a = c1 / k, b = c1 % k, c = c2 / k, d = c2 % k;
        if (a == c || b == d) continue;
        const double change = cost[a * k + d] + cost[c * k + b] - cost[c1] - cost[c2];
        if (change < -kGain) {
          const double theta = std::min(plan[c1], plan[c2]);
          plan[c1] -= theta;
          plan[c2] -= theta;
          plan[a * k + d] += theta;
          plan[c * k + b] += theta;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < plan.size(); ++c) total += plan[c] * cost[c];
  return total;
}

}  // namespace slowent
