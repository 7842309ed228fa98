#pragma once

// Small hand-rolled generators for property tests. Everything is driven by
// one std::mt19937_64 so a failing case can be replayed from its seed.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "slowent/transport.hpp"
#include "slowent/words.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline std::size_t below(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline std::string bits(Rng& rng, std::size_t n) {
  std::string s(n, '0');
  for (auto& c : s) c = (rng() & 1) ? '1' : '0';
  return s;
}

inline slowent::BinaryWord word(Rng& rng, std::size_t n) {
  return slowent::BinaryWord::from_string(bits(rng, n));
}

// Distinct words of length n (count must not exceed 2^n).
inline std::vector<slowent::BinaryWord> distinct(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<std::string> seen;
  std::vector<slowent::BinaryWord> out;
  while (out.size() < count) {
    auto s = bits(rng, n);
    bool fresh = true;
    for (const auto& t : seen) fresh = fresh && t != s;
    if (!fresh) continue;
    seen.push_back(s);
    out.push_back(slowent::BinaryWord::from_string(s));
  }
  return out;
}

// Random probabilities; with some chance a few entries are exactly zero.
inline std::vector<double> simplex(Rng& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = (rng() % 5 == 0) ? 0.0 : std::exponential_distribution<double>(1.0)(rng);
    total += x;
  }
  if (total == 0.0) {
    w[0] = 1.0;
    return w;
  }
  for (auto& x : w) x /= total;
  return w;
}

inline slowent::NameDistribution distribution(Rng& rng, std::size_t n, std::size_t max_support) {
  const std::size_t k = 1 + below(rng, max_support);
  return slowent::NameDistribution(distinct(rng, n, k), simplex(rng, k));
}

}  // namespace gen
