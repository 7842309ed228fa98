#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>

#include "gen.hpp"
#include "slowent/error.hpp"
#include "slowent/stacking.hpp"

using namespace slowent;

namespace {

std::shared_ptr<const DyadicCocycle> shared(DyadicCocycle c) {
  return std::make_shared<const DyadicCocycle>(std::move(c));
}

}  // namespace

TEST_CASE("tower on a hand-checked length") {
  const auto t = build_tower(14, 3);
  CHECK(t.column_heights == std::vector<std::size_t>{4, 4, 3, 3});
  CHECK(t.base_positions == std::vector<std::size_t>{0, 4, 8, 11});
  CHECK(t.tiles_exactly());
  CHECK(t.column_of(0) == 0);
  CHECK(t.column_of(7) == 1);
  CHECK(t.column_of(10) == 2);
  CHECK(t.column_of(13) == 3);
  CHECK_THROWS_AS(build_tower(11, 3), SizeError);
}

TEST_CASE("property: towers tile with heights h and h + 1") {
  gen::Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + gen::below(rng, 40);
    const std::size_t L = h * (h + 1) + gen::below(rng, 5000);
    for (const auto& t : {build_tower(L, h), build_tower(L, h, rng())}) {
      CHECK(t.tiles_exactly());
      std::size_t tall = 0, total = 0;
      for (auto x : t.column_heights) {
        CHECK((x == h || x == h + 1));
        tall += x == h + 1;
        total += x;
      }
      CHECK(total == L);
      CHECK(tall == L % h);
      const std::size_t probe = gen::below(rng, L);
      const auto c = t.column_of(probe);
      CHECK(t.base_positions[c] <= probe);
      CHECK(probe < t.base_positions[c] + t.column_heights[c]);
    }
  }
}

TEST_CASE("cocycle tables are validated") {
  CHECK_THROWS(DyadicCocycle(2, {{0, 1, 2, 2}}, {0}));
  CHECK_THROWS(DyadicCocycle(2, {{0, 1, 2, 3}}, {1}));
  CHECK_THROWS(DyadicCocycle::identity(0, 4));
  CHECK_THROWS(DyadicCocycle::identity(25, 4));
  const auto r = DyadicCocycle::random(5, 100, 7);
  for (std::size_t t = 0; t < r.steps(); ++t) {
    auto p = std::vector<std::uint32_t>(r.perm(t).begin(), r.perm(t).end());
    std::sort(p.begin(), p.end());
    for (std::uint32_t u = 0; u < p.size(); ++u) CHECK(p[u] == u);
  }
  const auto base = BinaryWord::from_string("0110");
  const auto c = DyadicCocycle::from_base_symbols(1, base, {0, 1}, {1, 0});
  CHECK(c.apply(0, 0) == 0);
  CHECK(c.apply(1, 0) == 1);
  CHECK(c.apply(3, 1) == 1);
}

TEST_CASE("skew names replay the fiber orbit") {
  const Orbit base{BinaryWord::zeros(64), "zeros", 0};
  CHECK(skew_names(base, DyadicCocycle::half_swap(2, 64), 0, 6).to_string() == "010101");
  CHECK(skew_names(base, DyadicCocycle::identity(3, 64), 5, 4).to_string() == "1111");

  gen::Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const unsigned d = 1 + static_cast<unsigned>(gen::below(rng, 8));
    const auto c = DyadicCocycle::random(d, 64, rng(), 1 + gen::below(rng, 5));
    const auto u0 = static_cast<std::uint32_t>(gen::below(rng, c.cells()));
    const std::size_t start = gen::below(rng, 20);
    const std::size_t n = 1 + gen::below(rng, 40);
    std::string expect;
    std::uint32_t u = u0;
    for (std::size_t t = 0; t < n; ++t) {
      expect += u >= c.cells() / 2 ? '1' : '0';
      u = c.perm(start + t)[u];
    }
    CHECK(skew_names(base, c, u0, n, start).to_string() == expect);
  }
  CHECK_THROWS_AS(skew_names(base, DyadicCocycle::identity(2, 64), 4, 3), PreconditionError);
  CHECK_THROWS_AS(skew_names(base, DyadicCocycle::identity(2, 64), 0, 65), PreconditionError);
}

TEST_CASE("stacked names: names cross columns with the same fiber point") {
  const auto tower = build_tower(10007, 40);
  const StackedNames sn(tower, 10, 3, BlockSource::uniform_words);
  CHECK(sn.m() == 4);
  gen::Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = gen::below(rng, tower.column_count() - 2);
    const std::uint64_t replica = rng() % 50;
    const auto joined = sn.column_name(c, replica).to_string() + sn.column_name(c + 1, replica).to_string() +
                        sn.column_name(c + 2, replica).to_string();
    const std::size_t level = gen::below(rng, tower.column_heights[c]);
    const std::size_t n = 1 + gen::below(rng, 80);
    CHECK(sn.name_from(c, level, replica, n).to_string() == joined.substr(level, n));
    CHECK(sn.name_at(tower.base_positions[c] + level, replica, n) == sn.name_from(c, level, replica, n));
    // block j is symbols [jM, jM + M) of the column
    const std::size_t j = gen::below(rng, 4);
    CHECK(BinaryWord::from_uint(sn.block(c, j, replica), 10).to_string() == joined.substr(j * 10, 10));
  }
  // the last column wraps to the first
  const std::size_t last = tower.column_count() - 1;
  const auto wrap = sn.name_from(last, tower.column_heights[last] - 1, 0, 3).to_string();
  CHECK(wrap.substr(1) == sn.column_name(0, 0).to_string().substr(0, 2));
  CHECK_THROWS(StackedNames(tower, 7, 3, BlockSource::uniform_words));
  CHECK_THROWS(StackedNames(tower, 10, 3, BlockSource::cocycle));
}

TEST_CASE("uniform block words pass a chi-square test") {
  const auto tower = build_tower(400000, 8);
  const StackedNames sn(tower, 4, 11, BlockSource::uniform_words);
  std::vector<double> counts(16, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < tower.column_count(); ++c) {
    for (std::size_t j = 0; j < 2; ++j) {
      counts[sn.block(c, j, c % 7)] += 1;
      total += 1;
    }
  }
  double chi2 = 0.0;
  for (auto x : counts) chi2 += (x - total / 16) * (x - total / 16) / (total / 16);
  CHECK(chi2 < 37.7);  // 15 dof, p = 0.001
}

TEST_CASE("adversarial and cocycle sources have their shapes") {
  const auto tower = build_tower(5000, 24);
  const StackedNames ident(tower, 8, 5, BlockSource::identity);
  const StackedNames rep(tower, 8, 5, BlockSource::repeated_blocks);
  const StackedNames still(tower, 8, 5, BlockSource::cocycle, shared(DyadicCocycle::identity(4, 5000)));
  const StackedNames swap(tower, 8, 5, BlockSource::cocycle, shared(DyadicCocycle::half_swap(4, 5000)));
  for (std::size_t c = 0; c < 20; ++c) {
    for (std::uint64_t y = 0; y < 4; ++y) {
      const auto col = ident.column_name(c, y).to_string();
      CHECK(col.find(col[0] == '0' ? '1' : '0') == std::string::npos);
      CHECK(rep.block(c, 0, y) == rep.block(c, 1, y));
      CHECK(rep.block(c, 1, y) == rep.block(c, 2, y));
      for (std::size_t j = 0; j < 3; ++j) {
        const auto s = still.block(c, j, y);
        CHECK((s == 0 || s == 0xff));
        const auto w = swap.block(c, j, y);
        CHECK((w == 0x55 || w == 0xaa));
      }
    }
  }
}

TEST_CASE("independence statistic on explicit rows") {
  gen::Rng rng(44);
  std::vector<BinaryWord> independent, coupled;
  for (int r = 0; r < 20000; ++r) {
    auto s = gen::bits(rng, 12);
    independent.push_back(BinaryWord::from_string(s));
    s.replace(4, 4, s.substr(0, 4));  // block 1 copies block 0
    coupled.push_back(BinaryWord::from_string(s));
  }
  const auto ind = check_rj_independence(independent, 4, 3);
  CHECK_FALSE(ind.dependent);
  CHECK(ind.max_corrected < 0.01);
  CHECK(ind.max_plug_in >= ind.max_corrected);
  CHECK(ind.pairs.size() == 3);  // (0,1), (1,2), (0,2)
  const auto dep = check_rj_independence(coupled, 4, 3);
  CHECK(dep.dependent);
  CHECK(dep.max_corrected == doctest::Approx(4.0).epsilon(0.01));
  CHECK_THROWS_AS(check_rj_independence(std::span(independent).first(50), 4, 3), InsufficientData);
  CHECK_THROWS_AS(check_rj_independence(std::span(independent).first(1000), 4, 3), InsufficientData);
}

TEST_CASE("uniform ball mass") {
  CHECK(uniform_ball_mass(10, 0.25) == doctest::Approx(56.0 / 1024.0));
  CHECK(uniform_ball_mass(10, 0.0) == 0.0);
  for (std::size_t n = 1; n <= 16; ++n) {
    for (double eps : {0.05, 0.1, 0.2, 0.3, 0.5}) {
      std::size_t inside = 0;
      for (std::uint32_t w = 0; w < (1u << n); ++w) inside += double(std::popcount(w)) / double(n) < eps;
      CHECK(uniform_ball_mass(n, eps) == doctest::Approx(double(inside) / double(1u << n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ball report on independent names") {
  // m = 40: the repeated-block source puts 2^-10 on one column name, far
  // above the 2^-14 bound.
  const auto tower = build_tower(400000, 400);
  const auto sn = independent_stack_names(tower, 10, 21);
  const auto rep = ball_bound_report(sn, 0.01, 2000, 9);
  CHECK(rep.pass);
  CHECK(rep.checks.size() >= 5);
  const StackedNames rep_blocks(tower, 10, 21, BlockSource::repeated_blocks);
  CHECK_FALSE(ball_bound_report(rep_blocks, 0.01, 20000, 9).pass);
  CHECK_THROWS_AS(ball_bound_report(sn, 0.3, 2000, 9), DomainError);
  CHECK_NOTHROW(ball_bound_report(sn, 0.3, 2000, 9, false));
  CHECK_THROWS_AS(ball_bound_report(sn, 0.01, 10, 9), PreconditionError);
}

TEST_CASE("property: sparse interval lemma") {
  gen::Rng rng(45);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t m = 1 + gen::below(rng, 30);
    const std::size_t M = 1 + gen::below(rng, 30);
    const double eps = std::uniform_real_distribution<double>(0.001, 0.5)(rng);
    const auto budget = static_cast<std::size_t>(std::floor(eps * double(m * M) + 1e-9));
    std::vector<std::size_t> A;
    const std::size_t size = budget == 0 ? 0 : gen::below(rng, budget + 1);
    // pack the set into few blocks half of the time
    for (std::size_t i = 0; i < size; ++i) A.push_back(trial % 2 ? gen::below(rng, m * M) : i);
    const auto res = sparse_interval_lemma(A, m, M, eps);
    std::vector<std::size_t> per(m, 0);
    std::sort(A.begin(), A.end());
    A.erase(std::unique(A.begin(), A.end()), A.end());
    for (auto a : A) ++per[a / M];
    std::vector<std::size_t> J;
    for (std::size_t j = 0; j < m; ++j) {
      if (double(per[j]) < std::sqrt(eps) * double(M)) J.push_back(j);
    }
    CHECK(res.J == J);
    CHECK(double(J.size()) >= (1 - std::sqrt(eps)) * double(m) - 1e-9);
    CHECK(res.strict_bound_holds == (double(J.size()) > res.bound));
  }
}

TEST_CASE("sparse interval lemma: equality case and preconditions") {
  const std::vector<std::size_t> A{0};
  const auto res = sparse_interval_lemma(A, 2, 2, 0.25);
  CHECK(res.J == std::vector<std::size_t>{1});
  CHECK(res.bound == doctest::Approx(1.0));
  CHECK_FALSE(res.strict_bound_holds);
  const std::vector<std::size_t> dup{3, 3, 3};
  CHECK(sparse_interval_lemma(dup, 4, 4, 0.1).J.size() == 4);
  const std::vector<std::size_t> outside{16};
  CHECK_THROWS_AS(sparse_interval_lemma(outside, 4, 4, 0.1), PreconditionError);
  const std::vector<std::size_t> heavy{0, 1, 2};
  CHECK_THROWS_AS(sparse_interval_lemma(heavy, 4, 4, 0.1), PreconditionError);
}
