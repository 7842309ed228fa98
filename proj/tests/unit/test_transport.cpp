#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gen.hpp"
#include "slowent/error.hpp"
#include "slowent/transport.hpp"

using namespace slowent;

namespace {

double assignment(const std::vector<BinaryWord>& a, const std::vector<BinaryWord>& b) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e9;
  do {
    double t = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) t += dbar_words(a[i], b[perm[i]]);
    best = std::min(best, t / static_cast<double>(a.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Sum over coordinates of |P(x_i = 1) - Q(x_i = 1)| / N: the value of a
// 1-Lipschitz test function, hence a lower bound on the transport cost.
double marginal_bound(const NameDistribution& p, const NameDistribution& q) {
  const std::size_t n = p.word_length();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mp = 0.0, mq = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) mp += p.probs()[a] * p.support()[a][i];
    for (std::size_t a = 0; a < q.size(); ++a) mq += q.probs()[a] * q.support()[a][i];
    total += std::abs(mp - mq);
  }
  return total / static_cast<double>(n);
}

}  // namespace

TEST_CASE("distribution validation") {
  const auto a = BinaryWord::from_string("01");
  const auto b = BinaryWord::from_string("10");
  CHECK_NOTHROW(NameDistribution({a, b}, {0.5, 0.5}));
  CHECK_THROWS(NameDistribution({a, a}, {0.5, 0.5}));
  CHECK_THROWS(NameDistribution({a, b}, {0.6, 0.5}));
  CHECK_THROWS(NameDistribution({a, b}, {1.5, -0.5}));
  CHECK_THROWS(NameDistribution({a, BinaryWord::from_string("1")}, {0.5, 0.5}));
  CHECK_THROWS(NameDistribution({}, {}));
  const std::vector<BinaryWord> names{a, b, a, a};
  const auto e = NameDistribution::empirical(names);
  REQUIRE(e.size() == 2);
  CHECK(e.support()[0] == a);
  CHECK(e.probs()[0] == doctest::Approx(0.75));
}

TEST_CASE("point masses reduce to the word distance") {
  gen::Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + gen::below(rng, 16);
    const auto a = gen::word(rng, n), b = gen::word(rng, n);
    CHECK(dbar_dist(NameDistribution::point_mass(a), NameDistribution::point_mass(b)) ==
          doctest::Approx(dbar_words(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("one symbol: the cost is the mass difference") {
  const auto zero = BinaryWord::from_string("0"), one = BinaryWord::from_string("1");
  const NameDistribution p({zero, one}, {0.3, 0.7});
  const NameDistribution q({zero, one}, {0.8, 0.2});
  CHECK(dbar_dist(p, q) == doctest::Approx(0.5));
  CHECK(dbar_dist_bipartite(p, q) == doctest::Approx(0.5));
  CHECK(dbar_dist_greedy(p, q) == doctest::Approx(0.5));
}

TEST_CASE("property: equal-weight supports match the assignment oracle") {
  gen::Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + gen::below(rng, 12);  // both exact routes
    const std::size_t k = 1 + gen::below(rng, std::min<std::size_t>(6, std::size_t{1} << (n - 1)));
    const auto a = gen::distinct(rng, n, k), b = gen::distinct(rng, n, k);
    const double oracle = assignment(a, b);
    const auto p = NameDistribution::uniform(a), q = NameDistribution::uniform(b);
    CHECK(std::abs(dbar_dist(p, q) - oracle) < 1e-9);
    CHECK(std::abs(dbar_dist_bipartite(p, q) - oracle) < 1e-9);
    if (n <= 12) CHECK(std::abs(dbar_dist_hypercube(p, q) - oracle) < 1e-9);
    CHECK(dbar_dist_greedy(p, q) >= oracle - 1e-12);
  }
}

TEST_CASE("property: hypercube and bipartite routes agree on general weights") {
  gen::Rng rng(23);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + gen::below(rng, 10);
    const std::size_t cap = std::min<std::size_t>(40, std::size_t{1} << n);
    const auto p = gen::distribution(rng, n, cap), q = gen::distribution(rng, n, cap);
    const double h = dbar_dist_hypercube(p, q);
    const double b = dbar_dist_bipartite(p, q);
    CHECK(std::abs(h - b) < 1e-9);
    CHECK(h >= marginal_bound(p, q) - 1e-12);
    CHECK(dbar_dist_greedy(p, q) >= b - 1e-12);
    CHECK(h <= 1.0 + 1e-12);
  }
}

TEST_CASE("property: metric axioms on random triples") {
  gen::Rng rng(24);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + gen::below(rng, 8);
    const std::size_t cap = std::min<std::size_t>(12, std::size_t{1} << n);
    const auto p = gen::distribution(rng, n, cap), q = gen::distribution(rng, n, cap), r = gen::distribution(rng, n, cap);
    const double pq = dbar_dist(p, q), qp = dbar_dist(q, p), pr = dbar_dist(p, r), qr = dbar_dist(q, r);
    CHECK(std::abs(pq - qp) < 1e-12);
    CHECK(dbar_dist(p, p) < 1e-12);
    CHECK(pr <= pq + qr + 1e-9);
  }
}

TEST_CASE("property: convex in each argument") {
  gen::Rng rng(25);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + gen::below(rng, 8);
    const std::size_t cap = std::min<std::size_t>(12, std::size_t{1} << n);
    const auto p1 = gen::distribution(rng, n, cap), p2 = gen::distribution(rng, n, cap), q = gen::distribution(rng, n, cap);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto mix = NameDistribution::mixture(p1, p2, lambda);
    CHECK(dbar_dist(mix, q) <= lambda * dbar_dist(p1, q) + (1 - lambda) * dbar_dist(p2, q) + 1e-9);
  }
}

TEST_CASE("dense hypercube entry point") {
  std::vector<double> excess(8, 0.0);
  CHECK(hypercube_transport(excess, 3) == 0.0);
  excess[0] = 1.0;
  excess[7] = -1.0;
  CHECK(hypercube_transport(excess, 3) == doctest::Approx(1.0));
  excess[7] = 0.0;
  excess[3] = -1.0;  // two coordinates of three
  CHECK(hypercube_transport(excess, 3) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(hypercube_transport(excess, 4), LengthMismatch);
  CHECK_THROWS_AS(hypercube_transport(std::vector<double>(2, 0.0), 0), SizeError);
}

TEST_CASE("size limit points at the greedy bound") {
  gen::Rng rng(26);
  const auto big = NameDistribution::uniform(gen::distinct(rng, 14, 300));
  const auto other = NameDistribution::uniform(gen::distinct(rng, 14, 300));
  CHECK_THROWS_AS(dbar_dist(big, other), SizeError);
  const double g = dbar_dist_greedy(big, other);
  CHECK(g >= marginal_bound(big, other) - 1e-12);
  CHECK(g <= 1.0);
}
