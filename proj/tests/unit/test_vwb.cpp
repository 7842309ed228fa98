#include <doctest.h>

#include <map>
#include <string>

#include "gen.hpp"
#include "slowent/error.hpp"
#include "slowent/models.hpp"
#include "slowent/transport.hpp"

using namespace slowent;

namespace {

struct Naive {
  double good_mass = 0.0;
  double max_ss = 0.0, mean_ss = 0.0;
  double max_sss = 0.0, mean_sss = 0.0;
  std::size_t retained = 0;
};

NameDistribution from_counts(const std::map<std::string, double>& counts) {
  std::vector<BinaryWord> support;
  std::vector<double> probs;
  double total = 0.0;
  for (const auto& [w, c] : counts) total += c;
  for (const auto& [w, c] : counts) {
    support.push_back(BinaryWord::from_string(w));
    probs.push_back(c / total);
  }
  return NameDistribution(std::move(support), std::move(probs));
}

// String-keyed re-derivation with the bipartite solver.
Naive naive_vwb(const std::string& r, const std::string& r0, std::size_t k, std::size_t N, double floor) {
  using Futures = std::map<std::string, double>;
  std::map<std::string, std::map<std::string, Futures>> by_b;  // B -> A -> futures
  const std::size_t L = r.size();
  std::size_t positions = 0;
  for (std::size_t t = k; t + k < L && t + N <= L; ++t) {
    by_b[r0.substr(t - k, 2 * k + 1)][r.substr(t - k, k)][r.substr(t, N)] += 1;
    ++positions;
  }
  Naive out;
  double retained_mass = 0.0, pair_weight = 0.0;
  for (const auto& [b, contexts] : by_b) {
    std::vector<std::pair<double, NameDistribution>> kept;
    Futures mixture;
    for (const auto& [a, fut] : contexts) {
      double c = 0.0;
      for (const auto& [w, x] : fut) c += x;
      if (c / positions < floor) continue;
      kept.emplace_back(c, from_counts(fut));
      for (const auto& [w, x] : fut) mixture[w] += x;
    }
    if (kept.empty()) continue;
    const auto pb = from_counts(mixture);
    for (const auto& [c, d] : kept) {
      const double v = kept.size() == 1 ? 0.0 : dbar_dist_bipartite(d, pb);
      out.max_ss = std::max(out.max_ss, v);
      out.mean_ss += c * v;
      retained_mass += c;
      ++out.retained;
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        const double v = dbar_dist_bipartite(kept[i].second, kept[j].second);
        const double w = kept[i].first * kept[j].first;
        out.max_sss = std::max(out.max_sss, v);
        out.mean_sss += w * v;
        pair_weight += w;
      }
    }
  }
  out.good_mass = retained_mass / positions;
  out.mean_ss = retained_mass > 0 ? out.mean_ss / retained_mass : 0.0;
  out.mean_sss = pair_weight > 0 ? out.mean_sss / pair_weight : 0.0;
  return out;
}

BinaryWord biased(gen::Rng& rng, std::size_t n, double p) {
  std::string s(n, '0');
  for (auto& c : s) c = std::uniform_real_distribution<double>(0, 1)(rng) < p ? '1' : '0';
  return BinaryWord::from_string(s);
}

}  // namespace

TEST_CASE("property: tester matches a string-keyed re-derivation") {
  gen::Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t k = 1 + gen::below(rng, 3);
    const std::size_t N = 1 + gen::below(rng, 4);
    const std::size_t L = 3000 + gen::below(rng, 3000);
    // R depends on R0 in half of the trials
    const auto r0 = biased(rng, L, 0.4);
    auto r = biased(rng, L, 0.5);
    if (trial % 2) {
      for (std::size_t i = 0; i < L; ++i) {
        if (rng() % 3 == 0) r.set(i, r0[i]);
      }
    }
    VwbParams p;
    p.k = k;
    p.N = N;
    p.epsilon = 0.1;
    p.min_atom_mass = 0.002;
    const auto [ss, sss] = vwb_test_both(r, r0, p);
    const auto ref = naive_vwb(r.to_string(), r0.to_string(), k, N, 0.002);
    CHECK(ss.good_mass == doctest::Approx(ref.good_mass).epsilon(1e-12));
    CHECK(ss.retained_atoms == ref.retained);
    CHECK(ss.max_dbar == doctest::Approx(ref.max_ss).epsilon(1e-9));
    CHECK(ss.mean_dbar == doctest::Approx(ref.mean_ss).epsilon(1e-9));
    CHECK(sss.max_dbar == doctest::Approx(ref.max_sss).epsilon(1e-9));
    CHECK(sss.mean_dbar == doctest::Approx(ref.mean_sss).epsilon(1e-9));
    CHECK(vwb_test(r, r0, p, VwbVariant::star_star).max_dbar == ss.max_dbar);
  }
}

TEST_CASE("property: the two variants bracket each other") {
  gen::Rng rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t L = 20000;
    const auto r0 = biased(rng, L, std::uniform_real_distribution<double>(0.1, 0.9)(rng));
    auto r = biased(rng, L, std::uniform_real_distribution<double>(0.1, 0.9)(rng));
    const auto mix = rng() % 4;
    for (std::size_t i = 1; i < L; ++i) {
      if (mix == 1 && rng() % 2) r.set(i, r0[i - 1]);
      if (mix == 2 && rng() % 2) r.set(i, r[i - 1]);
    }
    VwbParams p;
    p.k = 1 + gen::below(rng, 5);
    p.N = 1 + gen::below(rng, 8);
    const auto [ss, sss] = vwb_test_both(r, r0, p);
    CHECK(ss.max_dbar <= sss.max_dbar + 1e-9);
    CHECK(sss.max_dbar <= 2 * ss.max_dbar + 1e-9);
    CHECK(ss.good_mass == sss.good_mass);
    CHECK(ss.good_mass + ss.excluded_mass == doctest::Approx(1.0));
  }
}

TEST_CASE("independent Bernoulli over a rotation passes, a determined process fails") {
  const std::size_t L = 1'000'000;
  const auto r = sample_orbit(ProcessGenerator::bernoulli(0.5), L, 3).symbols;
  const auto rot = sample_orbit(ProcessGenerator::sturmian(RotationNumber::golden(), 0.0), L, 3).symbols;
  VwbParams p;
  p.k = 4;
  p.N = 6;
  p.epsilon = 0.05;
  const auto [ss, sss] = vwb_test_both(r, rot, p);
  CHECK(ss.pass);
  CHECK(sss.pass);

  // The rotation itself with no factor information: the past fixes the future.
  const auto constant = BinaryWord::zeros(L);
  const auto [dss, dsss] = vwb_test_both(rot, constant, p);
  CHECK_FALSE(dss.pass);
  CHECK(dss.max_dbar > 0.3);
  CHECK(dsss.max_dbar >= dss.max_dbar);
}

TEST_CASE("the default estimation floor is clamped") {
  const auto r = sample_orbit(ProcessGenerator::bernoulli(0.5), 5000, 1).symbols;
  VwbParams p;
  p.k = 2;
  p.N = 3;
  const auto rep = vwb_test(r, r, p, VwbVariant::star_star);
  CHECK(rep.min_atom_mass == doctest::Approx(0.01));  // 80 / 4995 clamps to 0.01
  CHECK(rep.positions == 5000 - 2 - 3 + 1);
}

TEST_CASE("preconditions") {
  const auto r = BinaryWord::zeros(1000);
  VwbParams p;
  p.k = 2;
  p.N = 3;
  CHECK_THROWS_AS(vwb_test(r, BinaryWord::zeros(999), p, VwbVariant::star_star), LengthMismatch);
  CHECK_THROWS_AS(vwb_test(BinaryWord::zeros(50), BinaryWord::zeros(50), p, VwbVariant::star_star), SizeError);
  p.epsilon = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.epsilon = 0.05;
  p.N = 21;
  CHECK_THROWS_AS(p.validate(), SizeError);
  p.N = 3;
  p.min_atom_mass = 0.2;
  CHECK_THROWS_AS(p.validate(), DomainError);
}
