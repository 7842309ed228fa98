#include <doctest.h>

#include <algorithm>
#include <bit>
#include <string>

#include "gen.hpp"
#include "slowent/covering.hpp"
#include "slowent/error.hpp"
#include "slowent/window_index.hpp"

using namespace slowent;

namespace {

struct Instance {
  std::vector<std::string> words;
  std::vector<double> weights;
  WeightedSample sample() const {
    std::vector<BinaryWord> w;
    for (const auto& s : words) w.push_back(BinaryWord::from_string(s));
    return WeightedSample(std::move(w), weights);
  }
};

// Words clustered around a few random centers so balls overlap.
Instance clustered(gen::Rng& rng, std::size_t count, std::size_t n) {
  const std::size_t hubs = 1 + gen::below(rng, 3);
  std::vector<std::string> centers;
  for (std::size_t h = 0; h < hubs; ++h) centers.push_back(gen::bits(rng, n));
  Instance in;
  for (std::size_t i = 0; i < count; ++i) {
    auto s = centers[gen::below(rng, hubs)];
    const std::size_t flips = gen::below(rng, n / 3 + 1);
    for (std::size_t f = 0; f < flips; ++f) {
      auto& c = s[gen::below(rng, n)];
      c = c == '0' ? '1' : '0';
    }
    in.words.push_back(s);
  }
  in.weights = gen::simplex(rng, count);
  return in;
}

bool within(const std::string& a, const std::string& b, double eps) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return static_cast<double>(d) / static_cast<double>(a.size()) < eps;
}

bool reached(double uncovered, double delta) { return uncovered < delta || uncovered == 0.0; }

// Smallest number of sample-word centers reaching the target, by bitmask.
std::size_t brute_cover(const Instance& in, double eps, double delta) {
  const std::size_t P = in.words.size();
  std::size_t best = P;
  for (std::uint32_t mask = 0; mask < (1u << P); ++mask) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    if (k >= best) continue;
    double uncovered = 0.0;
    for (std::size_t j = 0; j < P; ++j) {
      bool hit = false;
      for (std::size_t c = 0; c < P && !hit; ++c) hit = ((mask >> c) & 1) && within(in.words[c], in.words[j], eps);
      if (!hit) uncovered += in.weights[j];
    }
    if (reached(uncovered, delta)) best = k;
  }
  return best;
}

double uncovered_by(const Instance& in, const std::vector<std::size_t>& centers, double eps) {
  double u = 0.0;
  for (std::size_t j = 0; j < in.words.size(); ++j) {
    bool hit = false;
    for (auto c : centers) hit = hit || within(in.words[c], in.words[j], eps);
    if (!hit) u += in.weights[j];
  }
  return u;
}

}  // namespace

TEST_CASE("ball mass counts strictly inside the radius") {
  const WeightedSample s({BinaryWord::from_string("0000"), BinaryWord::from_string("0001"),
                          BinaryWord::from_string("0011")},
                         {0.5, 0.3, 0.2});
  const auto c = BinaryWord::from_string("0000");
  CHECK(ball_mass(s, c, 0.25) == doctest::Approx(0.5));  // distance 1/4 is not < 1/4
  CHECK(ball_mass(s, c, 0.26) == doctest::Approx(0.8));
  CHECK(ball_mass(s, c, 0.51) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ball_mass(s, BinaryWord::zeros(3), 0.1), LengthMismatch);
}

TEST_CASE("property: exact cover matches a bitmask oracle, greedy sits above it") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t P = 2 + gen::below(rng, 9);
    const std::size_t n = 6 + gen::below(rng, 20);
    const auto in = clustered(rng, P, n);
    CoverParams p;
    p.n = n;
    p.epsilon = std::uniform_real_distribution<double>(0.05, 0.4)(rng);
    p.delta = (trial % 4 == 0) ? 0.0 : std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    const auto s = in.sample();
    const auto exact = exact_cover_oracle(s, p);
    const auto greedy = greedy_cover(s, p);
    CHECK(exact.k == brute_cover(in, p.epsilon, p.delta));
    CHECK(exact.k == exact.centers.size());
    CHECK(reached(uncovered_by(in, exact.centers, p.epsilon), p.delta + 1e-12));
    CHECK(greedy.k >= exact.k);
    CHECK(reached(uncovered_by(in, greedy.centers, p.epsilon), p.delta + 1e-12));
    CHECK(greedy.covered_mass == doctest::Approx(1.0 - uncovered_by(in, greedy.centers, p.epsilon)));
    CHECK(packing_lower_bound(s, p.epsilon, p.delta) <= exact.k);
  }
}

TEST_CASE("property: separated family is 2 eps separated and maximal") {
  gen::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 8 + gen::below(rng, 30);
    const auto in = clustered(rng, 3 + gen::below(rng, 30), n);
    const double eps = std::uniform_real_distribution<double>(0.02, 0.3)(rng);
    const auto fam = separated_family(in.sample(), eps);
    for (std::size_t a = 0; a < fam.size(); ++a) {
      CHECK(in.weights[fam[a]] > 0.0);
      for (std::size_t b = a + 1; b < fam.size(); ++b) CHECK_FALSE(within(in.words[fam[a]], in.words[fam[b]], 2 * eps));
    }
    for (std::size_t j = 0; j < in.words.size(); ++j) {
      if (in.weights[j] == 0.0) continue;
      bool near = false;
      for (auto f : fam) near = near || within(in.words[f], in.words[j], 2 * eps);
      CHECK(near);
    }
  }
}

TEST_CASE("packing bound on a hand-checked family") {
  // Four mutually far words with weights 0.4, 0.3, 0.2, 0.1.
  const WeightedSample s({BinaryWord::from_string("00000000"), BinaryWord::from_string("11110000"),
                          BinaryWord::from_string("00001111"), BinaryWord::from_string("11111111")},
                         {0.4, 0.3, 0.2, 0.1});
  CHECK(packing_lower_bound(s, 0.1, 0.05) == 4);
  CHECK(packing_lower_bound(s, 0.1, 0.15) == 3);   // leave the 0.1 point
  CHECK(packing_lower_bound(s, 0.1, 0.31) == 2);   // 0.1 + 0.2 < 0.31
  CHECK(packing_lower_bound(s, 0.1, 0.0) == 4);
  CHECK(packing_lower_bound(s, 0.1, 0.99) == 1);
}

TEST_CASE("cover parameters") {
  CoverParams p;
  p.n = 10;
  p.mode = CoverMode::lemma;
  p.epsilon = 0.01;
  p.delta = 0.01;
  CHECK_NOTHROW(p.validate());
  p.epsilon = 0.02;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.mode = CoverMode::exploratory;
  CHECK_NOTHROW(p.validate());
  p.epsilon = 1.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK(cover_csv_header() == "method,n,epsilon,delta,k,covered_mass,seed");
}

TEST_CASE("exact oracle refuses large samples") {
  gen::Rng rng(13);
  std::vector<BinaryWord> w;
  for (std::size_t i = 0; i <= exact_cover_limit; ++i) w.push_back(gen::word(rng, 12));
  CoverParams p;
  p.n = 12;
  p.epsilon = 0.1;
  p.delta = 0.1;
  CHECK_THROWS_AS(exact_cover_oracle(WeightedSample::uniform(w), p), SizeError);
}

TEST_CASE("separation verdict") {
  CHECK(separation_check(801, 1603) == Separation::inside_U);
  CHECK(separation_check(801, 1602) == Separation::not_certified);
  CHECK(to_string(Separation::inside_U) == "inside_U");
}

TEST_CASE("block coding cover on a Sturmian base") {
  const auto g = ProcessGenerator::sturmian(RotationNumber::golden(), 0.0);
  const auto orbit = sample_orbit(g, 200000, 1);
  for (std::size_t n : {8, 32, 64}) {
    CoverParams p;
    p.n = n;
    p.mode = CoverMode::lemma;
    for (const auto& code : {WindowCode::identity(), WindowCode::majority(1), WindowCode::majority(2)}) {
      const auto bc = block_coding_cover(orbit, code, p);
      const std::size_t width = n + 2 * code.half_width() + 1;
      // one center per atom; atoms are distinct windows of the base
      CHECK(bc.cover.k <= bc.atom_count);
      CHECK(bc.atom_count <= count_distinct_windows(orbit.symbols, width));
      CHECK(bc.atom_count <= width + 1);
      CHECK(bc.good_mass == doctest::Approx(1.0));
      CHECK(bc.cover.covered_mass == doctest::Approx(1.0));
      CHECK(bc.lemma_precondition_met);
      CHECK(bc.cover.k <= 2 * n + 1);  // a_2n of the golden rotation
    }
  }
}

TEST_CASE("block coding cover against a foreign Q") {
  // Q is the raw base, Qhat a majority vote: they disagree on isolated symbols.
  const auto orbit = sample_orbit(ProcessGenerator::bernoulli(0.5), 20000, 3);
  CoverParams p;
  p.n = 16;
  p.epsilon = 0.2;
  p.delta = 0.2;
  const auto bc = block_coding_cover(orbit, WindowCode::majority(1), orbit.symbols, p);
  CHECK(bc.good_mass < 1.0);
  CHECK(bc.good_mass > 0.0);
  CHECK(bc.covered_mass_double_radius >= bc.cover.covered_mass);
}
