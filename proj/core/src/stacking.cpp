#include "slowent/stacking.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "slowent/error.hpp"
#include "slowent/parallel.hpp"
#include "slowent/random.hpp"

namespace slowent {
namespace {

std::uint64_t low_mask(std::size_t n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

bool is_permutation_of_cells(const std::vector<std::uint32_t>& p, std::uint32_t cells) {
  if (p.size() != cells) return false;
  std::vector<std::uint32_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < cells; ++i) {
    if (sorted[i] != i) return false;
  }
  return true;
}

void check_resolution(unsigned d) {
  if (d < 1 || d > 24) throw DomainError("DyadicCocycle: resolution d must lie in [1, 24]");
}

RokhlinTower tower_from_heights(std::size_t length, std::size_t h, std::vector<std::size_t> heights) {
  RokhlinTower t;
  t.length = length;
  t.h = h;
  t.column_heights = std::move(heights);
  t.base_positions.reserve(t.column_heights.size());
  std::size_t pos = 0;
  for (auto height : t.column_heights) {
    t.base_positions.push_back(pos);
    pos += height;
  }
  return t;
}

std::vector<std::size_t> tower_heights(std::size_t length, std::size_t h) {
  if (h == 0) throw DomainError("build_tower: h must be positive");
  if (length / (h + 1) < h) {
    throw SizeError("build_tower: L = " + std::to_string(length) + " is below h (h + 1) = " +
                    std::to_string(h * (h + 1)));
  }
  const std::size_t tall = length % h;
  const std::size_t short_count = (length - tall * (h + 1)) / h;
  std::vector<std::size_t> heights(tall, h + 1);
  heights.insert(heights.end(), short_count, h);
  return heights;
}

// Entropy of an empirical distribution in bits, and its number of occupied cells.
std::pair<double, std::size_t> plug_in_entropy(const std::vector<std::size_t>& counts, double n) {
  double h = 0.0;
  std::size_t occupied = 0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
    ++occupied;
  }
  return {h, occupied};
}

template <class BlockFn>
IndependenceReport independence(std::size_t rows, std::size_t M, std::size_t m, double threshold,
                                 BlockFn&& block) {
  if (M < 1 || M > 8) throw SizeError("check_rj_independence: M must lie in [1, 8]");
  // The bias correction is only meaningful once rows outnumber the 4^M
  // joint cells.
  const std::size_t needed = std::max<std::size_t>(100, std::size_t{4} << (2 * M));
  if (rows < needed) {
    throw InsufficientData("check_rj_independence: " + std::to_string(rows) + " columns; at least " +
                           std::to_string(needed) + " are needed for M = " + std::to_string(M));
  }
  if (m < 2) throw PreconditionError("check_rj_independence: needs m >= 2 blocks per column");

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j + 1 < m; ++j) pairs.emplace_back(j, j + 1);
  if (m > 2) pairs.emplace_back(0, m - 1);

  const std::size_t K = std::size_t{1} << M;
  const double n = static_cast<double>(rows);
  IndependenceReport rep;
  rep.columns = rows;
  rep.M = M;
  rep.threshold = threshold;
  rep.pairs.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [j, j2] = pairs[i];
    std::vector<std::size_t> joint(K * K, 0), left(K, 0), right(K, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto a = static_cast<std::size_t>(block(r, j));
      const auto b = static_cast<std::size_t>(block(r, j2));
      ++joint[a * K + b];
      ++left[a];
      ++right[b];
    }
    const auto [hx, kx] = plug_in_entropy(left, n);
    const auto [hy, ky] = plug_in_entropy(right, n);
    const auto [hxy, kxy] = plug_in_entropy(joint, n);
    BlockPairMi out;
    out.j = j;
    out.j2 = j2;
    out.plug_in = hx + hy - hxy;
    const double correction = (static_cast<double>(kxy) - static_cast<double>(kx) -
                               static_cast<double>(ky) + 1.0) /
                              (2.0 * n * std::log(2.0));
    out.corrected = out.plug_in - correction;
    rep.pairs[i] = out;
  });
  for (const auto& p : rep.pairs) {
    rep.max_plug_in = std::max(rep.max_plug_in, p.plug_in);
    rep.max_corrected = std::max(rep.max_corrected, p.corrected);
  }
  rep.dependent = rep.max_corrected >= threshold;
  return rep;
}

BoundCheck upper_check(std::string name, double estimate, double bound, std::size_t count,
                       bool asserted) {
  BoundCheck c;
  c.name = std::move(name);
  c.estimate = estimate;
  c.bound = bound;
  const double b = std::clamp(bound, 0.0, 1.0);
  c.sigma = std::sqrt(b * (1.0 - b) / static_cast<double>(count));
  c.relation = "<=";
  c.asserted = asserted;
  c.pass = estimate <= bound + 3.0 * c.sigma;
  return c;
}

BoundCheck mean_check(std::string name, const std::vector<double>& values, double target,
                      bool asserted) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n - 1.0;
  BoundCheck c;
  c.name = std::move(name);
  c.estimate = mean;
  c.bound = target;
  c.sigma = std::sqrt(var / n);
  c.relation = "~=";
  c.asserted = asserted;
  c.pass = std::abs(mean - target) <= 3.0 * c.sigma;
  return c;
}

double ball_exponent_bound(std::size_t blocks, double radius) {
  if (radius >= 0.5) return 1.0;
  return std::min(1.0, std::exp2(static_cast<double>(blocks) * (-0.5 + binary_entropy(radius))));
}

}  // namespace

// --- towers -------------------------------------------------------------------

std::size_t RokhlinTower::column_of(std::size_t t) const {
  if (t >= length) throw PreconditionError("RokhlinTower::column_of: index outside [0, L)");
  auto it = std::upper_bound(base_positions.begin(), base_positions.end(), t);
  return static_cast<std::size_t>(it - base_positions.begin()) - 1;
}

bool RokhlinTower::tiles_exactly() const {
  if (base_positions.size() != column_heights.size() || base_positions.empty()) return false;
  std::size_t pos = 0;
  for (std::size_t c = 0; c < base_positions.size(); ++c) {
    if (base_positions[c] != pos) return false;
    if (column_heights[c] != h && column_heights[c] != h + 1) return false;
    pos += column_heights[c];
  }
  return pos == length;
}

RokhlinTower build_tower(std::size_t length, std::size_t h) {
  return tower_from_heights(length, h, tower_heights(length, h));
}

RokhlinTower build_tower(std::size_t length, std::size_t h, std::uint64_t shuffle_seed) {
  auto heights = tower_heights(length, h);
  Rng rng(shuffle_seed);
  for (std::size_t i = heights.size(); i > 1; --i) {
    std::swap(heights[i - 1], heights[uniform_below(rng, i)]);
  }
  return tower_from_heights(length, h, std::move(heights));
}

nlohmann::json to_json(const RokhlinTower& t) {
  const auto tall = static_cast<std::size_t>(
      std::count(t.column_heights.begin(), t.column_heights.end(), t.h + 1));
  return {{"length", t.length},
          {"h", t.h},
          {"columns", t.column_count()},
          {"tall_columns", tall},
          {"tiles_exactly", t.tiles_exactly()}};
}

// --- cocycles -------------------------------------------------------------------

DyadicCocycle::DyadicCocycle(unsigned d, std::vector<std::vector<std::uint32_t>> table,
                             std::vector<std::uint32_t> step_index)
    : d_(d), table_(std::move(table)), step_index_(std::move(step_index)) {
  check_resolution(d_);
  if (table_.empty()) throw PreconditionError("DyadicCocycle: empty permutation table");
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (!is_permutation_of_cells(table_[i], cells())) {
      throw PreconditionError("DyadicCocycle: table entry " + std::to_string(i) +
                              " is not a permutation of the 2^d cells");
    }
  }
  for (auto idx : step_index_) {
    if (idx >= table_.size()) throw PreconditionError("DyadicCocycle: step index out of range");
  }
}

DyadicCocycle DyadicCocycle::identity(unsigned d, std::size_t steps) {
  check_resolution(d);
  std::vector<std::uint32_t> id(std::size_t{1} << d);
  std::iota(id.begin(), id.end(), 0U);
  return DyadicCocycle(d, {std::move(id)}, std::vector<std::uint32_t>(steps, 0));
}

DyadicCocycle DyadicCocycle::half_swap(unsigned d, std::size_t steps) {
  check_resolution(d);
  const std::uint32_t half = std::uint32_t{1} << (d - 1);
  std::vector<std::uint32_t> p(std::size_t{1} << d);
  for (std::uint32_t u = 0; u < p.size(); ++u) p[u] = u ^ half;
  return DyadicCocycle(d, {std::move(p)}, std::vector<std::uint32_t>(steps, 0));
}

DyadicCocycle DyadicCocycle::random(unsigned d, std::size_t steps, std::uint64_t seed,
                                    std::size_t table_size) {
  check_resolution(d);
  if (table_size == 0) throw PreconditionError("DyadicCocycle::random: table_size must be positive");
  Rng rng(seed);
  std::vector<std::vector<std::uint32_t>> table(table_size);
  for (auto& p : table) {
    p.resize(std::size_t{1} << d);
    std::iota(p.begin(), p.end(), 0U);
    for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[uniform_below(rng, i)]);
  }
  std::vector<std::uint32_t> index(steps);
  for (auto& x : index) x = static_cast<std::uint32_t>(uniform_below(rng, table_size));
  return DyadicCocycle(d, std::move(table), std::move(index));
}

DyadicCocycle DyadicCocycle::from_base_symbols(unsigned d, const BinaryWord& base,
                                               std::vector<std::uint32_t> perm0,
                                               std::vector<std::uint32_t> perm1) {
  std::vector<std::uint32_t> index(base.size());
  for (std::size_t t = 0; t < base.size(); ++t) index[t] = base[t] ? 1U : 0U;
  return DyadicCocycle(d, {std::move(perm0), std::move(perm1)}, std::move(index));
}

BinaryWord skew_names(const Orbit& base, const DyadicCocycle& c, std::uint32_t u0, std::size_t n,
                      std::size_t start) {
  if (n == 0) throw PreconditionError("skew_names: n must be positive");
  if (start + n > base.symbols.size()) {
    throw PreconditionError("skew_names: name runs past the base orbit");
  }
  if (u0 >= c.cells()) throw PreconditionError("skew_names: u0 must be below 2^d");
  if (start + n - 1 > c.steps()) {
    throw PreconditionError("skew_names: the cocycle has too few steps");
  }
  const std::uint32_t half = c.cells() / 2;
  BinaryWord out = BinaryWord::zeros(n);
  std::uint32_t u = u0;
  for (std::size_t t = 0; t < n; ++t) {
    out.set(t, u >= half);
    if (t + 1 < n) u = c.apply(start + t, u);
  }
  return out;
}

// --- stacked names ------------------------------------------------------------------

std::string to_string(BlockSource s) {
  switch (s) {
    case BlockSource::uniform_words: return "uniform_words";
    case BlockSource::identity: return "identity";
    case BlockSource::repeated_blocks: return "repeated_blocks";
    case BlockSource::cocycle: return "cocycle";
  }
  return "unknown";
}

StackedNames::StackedNames(RokhlinTower tower, std::size_t M, std::uint64_t seed, BlockSource source,
                           std::shared_ptr<const DyadicCocycle> cocycle)
    : tower_(std::move(tower)), M_(M), m_(0), seed_(seed), source_(source), cocycle_(std::move(cocycle)) {
  if (!tower_.tiles_exactly()) throw PreconditionError("StackedNames: tower does not tile [0, L)");
  if (M_ == 0 || M_ > tower_.h) throw PreconditionError("StackedNames: M must lie in [1, h]");
  if (M_ > 64) throw SizeError("StackedNames: M must be at most 64");
  if (tower_.h % M_ != 0) throw PreconditionError("StackedNames: M must divide the tower height h");
  m_ = tower_.h / M_;
  if (source_ == BlockSource::cocycle) {
    if (!cocycle_) throw PreconditionError("StackedNames: cocycle source needs a cocycle");
    if (cocycle_->steps() + 1 < tower_.length) {
      throw PreconditionError("StackedNames: the cocycle must cover every orbit step");
    }
  }
}

std::size_t StackedNames::block_length(std::size_t column, std::size_t j) const {
  if (j < m_) return M_;
  if (j == m_) return tower_.column_heights[column] - m_ * M_;
  throw PreconditionError("StackedNames: block index past the column");
}

std::uint64_t StackedNames::block(std::size_t column, std::size_t j, std::uint64_t replica) const {
  if (column >= tower_.column_count()) throw PreconditionError("StackedNames: column out of range");
  const std::size_t len = block_length(column, j);
  if (len == 0) return 0;
  const std::uint64_t mask = low_mask(len);
  switch (source_) {
    case BlockSource::uniform_words:
      return mix64(derive_seed(seed_, {column, j, replica})) & mask;
    case BlockSource::identity:
      return (derive_seed(seed_, {replica}) & 1U) ? mask : 0;
    case BlockSource::repeated_blocks:
      return mix64(derive_seed(seed_, {column, replica})) & low_mask(M_) & mask;
    case BlockSource::cocycle: {
      const std::uint32_t half = cocycle_->cells() / 2;
      auto u = static_cast<std::uint32_t>(derive_seed(seed_, {column, j, replica}) &
                                          (cocycle_->cells() - 1));
      const std::size_t t0 = tower_.base_positions[column] + j * M_;
      std::uint64_t word = 0;
      for (std::size_t i = 0; i < len; ++i) {
        if (u >= half) word |= std::uint64_t{1} << i;
        if (t0 + i < cocycle_->steps()) u = cocycle_->apply(t0 + i, u);
      }
      return word;
    }
  }
  return 0;
}

BinaryWord StackedNames::column_name(std::size_t column, std::uint64_t replica) const {
  return name_from(column, 0, replica, tower_.column_heights.at(column));
}

BinaryWord StackedNames::name_from(std::size_t column, std::size_t level, std::uint64_t replica,
                                   std::size_t n) const {
  if (n == 0) throw PreconditionError("StackedNames::name_from: n must be positive");
  if (column >= tower_.column_count() || level >= tower_.column_heights[column]) {
    throw PreconditionError("StackedNames::name_from: point outside the tower");
  }
  BinaryWord out = BinaryWord::zeros(n);
  std::size_t pos = 0;
  std::size_t c = column;
  std::size_t l = level;
  while (pos < n) {
    const std::size_t j = std::min(l / M_, m_);
    const std::size_t within = l - j * M_;
    const std::size_t take = std::min(block_length(c, j) - within, n - pos);
    const std::uint64_t bits = (block(c, j, replica) >> within) & low_mask(take);
    for (std::size_t i = 0; i < take; ++i) out.set(pos + i, (bits >> i) & 1U);
    pos += take;
    l += take;
    if (l == tower_.column_heights[c]) {
      c = c + 1 == tower_.column_count() ? 0 : c + 1;
      l = 0;
    }
  }
  return out;
}

BinaryWord StackedNames::name_at(std::size_t t, std::uint64_t replica, std::size_t n) const {
  const std::size_t c = tower_.column_of(t);
  return name_from(c, t - tower_.base_positions[c], replica, n);
}

StackedNames independent_stack_names(const RokhlinTower& tower, std::size_t M, std::uint64_t seed) {
  return StackedNames(tower, M, seed, BlockSource::uniform_words);
}

// --- independence -------------------------------------------------------------------

IndependenceReport check_rj_independence(const StackedNames& sn, double threshold) {
  return independence(sn.tower().column_count(), sn.M(), sn.m(), threshold,
                      [&](std::size_t c, std::size_t j) { return sn.block(c, j, c); });
}

IndependenceReport check_rj_independence(std::span<const BinaryWord> rows, std::size_t M,
                                         std::size_t m, double threshold) {
  for (const auto& r : rows) {
    if (r.size() < m * M) throw LengthMismatch("check_rj_independence: row shorter than m M");
  }
  return independence(rows.size(), M, m, threshold,
                      [&](std::size_t r, std::size_t j) { return rows[r].window(j * M, M); });
}

nlohmann::json to_json(const IndependenceReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"j", p.j}, {"j2", p.j2}, {"mi_plug_in", p.plug_in}, {"mi_corrected", p.corrected}});
  }
  return {{"columns", r.columns},
          {"M", r.M},
          {"threshold", r.threshold},
          {"max_mi_plug_in", r.max_plug_in},
          {"max_mi_corrected", r.max_corrected},
          {"verdict", r.dependent ? "dependent" : "independent"},
          {"pairs", pairs}};
}

// --- ball lemmas -----------------------------------------------------------------------

double uniform_ball_mass(std::size_t n, double epsilon) {
  if (n == 0 || n > 1000) throw SizeError("uniform_ball_mass: n must lie in [1, 1000]");
  const long r = strict_radius_count(n, epsilon);
  double total = 0.0;
  const double nn = static_cast<double>(n);
  for (long j = 0; j <= r; ++j) {
    const double jj = static_cast<double>(j);
    total += std::exp(std::lgamma(nn + 1) - std::lgamma(jj + 1) - std::lgamma(nn - jj + 1) -
                      nn * std::log(2.0));
  }
  return std::min(total, 1.0);
}

BallBoundReport ball_bound_report(const StackedNames& sn, double epsilon, std::size_t sample_count,
                                  std::uint64_t seed, bool lemma_mode) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("ball_bound_report: epsilon must lie in (0, 1)");
  if (lemma_mode && !(epsilon < 0.25)) {
    throw DomainError("ball_bound_report: lemma mode needs epsilon in (0, 1/4)");
  }
  if (sample_count < 1000) throw PreconditionError("ball_bound_report: sample_count must be >= 1000");

  const auto& tower = sn.tower();
  const std::size_t M = sn.M();
  const std::size_t m = sn.m();
  const std::size_t n = m * M;
  const std::size_t columns = tower.column_count();
  const long full_radius = strict_radius_count(n, epsilon);
  const long block_radius = strict_radius_count(M, epsilon);

  BallBoundReport rep;
  rep.epsilon = epsilon;
  rep.M = M;
  rep.m = m;
  rep.sample_count = sample_count;
  rep.lemma_mode = lemma_mode;

  const std::size_t c0 = derive_seed(seed, {0, 0}) % columns;
  const std::uint64_t r0 = derive_seed(seed, {0, 1});
  const BinaryWord center = sn.name_from(c0, 0, r0, n);

  // Base points: fresh fiber points over uniformly chosen columns.
  std::vector<std::size_t> sample_column(sample_count);
  std::vector<std::uint64_t> sample_replica(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) {
    sample_column[i] = derive_seed(seed, {1, i}) % columns;
    sample_replica[i] = derive_seed(seed, {2, i});
  }

  // (a) mM-ball around the base center.
  std::vector<std::uint8_t> hit(sample_count, 0);
  parallel_for(sample_count, [&](std::size_t i) {
    const BinaryWord w = sn.name_from(sample_column[i], 0, sample_replica[i], n);
    hit[i] = static_cast<long>(mismatch_count(w, center)) <= full_radius;
  });
  const double hits_a = static_cast<double>(std::count(hit.begin(), hit.end(), 1));
  rep.checks.push_back(upper_check("mM_ball_base_center", hits_a / static_cast<double>(sample_count),
                                   ball_exponent_bound(m, 2.0 * epsilon), sample_count, lemma_mode));

  // (b) M-block balls.
  const double half_bound = 0.5 + 2.0 * epsilon;
  auto block_ball = [&](std::uint64_t c_word, auto&& level_of) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < sample_count; ++i) {
      const std::uint64_t w = sn.block(sample_column[i], level_of(i), sample_replica[i]);
      if (static_cast<long>(std::popcount(w ^ c_word)) <= block_radius) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(sample_count);
  };
  Rng rng(derive_seed(seed, {3}));
  double free_max = 0.0;
  for (int c = 0; c < 8; ++c) {
    const std::uint64_t word = rng() & ((M >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << M) - 1));
    free_max = std::max(free_max, block_ball(word, [&](std::size_t i) { return i % m; }));
  }
  rep.checks.push_back(upper_check("M_block_ball_free_centers", free_max, half_bound, sample_count,
                                   lemma_mode));
  std::vector<double> level_mass(m);
  parallel_for(m, [&](std::size_t j) {
    level_mass[j] = block_ball(sn.block(c0, j, r0), [j](std::size_t) { return j; });
  });
  rep.checks.push_back(upper_check("M_block_ball_level_centers",
                                   *std::max_element(level_mass.begin(), level_mass.end()), half_bound,
                                   sample_count, lemma_mode));
  if (M <= 20) {
    BoundCheck exact;
    exact.name = "M_block_ball_uniform_exact";
    exact.estimate = uniform_ball_mass(M, epsilon);
    exact.bound = half_bound;
    exact.sigma = 0.0;
    exact.asserted = lemma_mode;
    exact.pass = exact.estimate <= exact.bound;
    rep.checks.push_back(exact);
  }

  // (c) mean d-bar_M to a fixed center.
  {
    const std::uint64_t c_word = sn.block(c0, 0, r0);
    std::vector<double> d(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
      const std::uint64_t w = sn.block(sample_column[i], i % m, sample_replica[i]);
      d[i] = static_cast<double>(std::popcount(w ^ c_word)) / static_cast<double>(M);
    }
    rep.checks.push_back(mean_check("mean_dbar_M", d, 0.5, lemma_mode));
  }

  // (d) mid-column center against points spread over all of Y.
  {
    const std::size_t mid_level = tower.column_heights[c0] / 2;
    const BinaryWord mid_center = sn.name_from(c0, mid_level, r0, n);
    std::vector<std::uint8_t> mid_hit(sample_count, 0);
    parallel_for(sample_count, [&](std::size_t i) {
      const std::size_t t = derive_seed(seed, {4, i}) % tower.length;
      const BinaryWord w = sn.name_at(t, sample_replica[i], n);
      mid_hit[i] = static_cast<long>(mismatch_count(w, mid_center)) <= full_radius;
    });
    const double hits = static_cast<double>(std::count(mid_hit.begin(), mid_hit.end(), 1));
    rep.checks.push_back(upper_check("mM_ball_mid_column_center", hits / static_cast<double>(sample_count),
                                     ball_exponent_bound(m / 2, std::min(4.0 * epsilon, 0.5)),
                                     sample_count, lemma_mode));
  }

  // (e) each level jM carries relative measure 1/2 in the upper fiber half.
  // For the cocycle source this is measured on the skew names before any
  // resampling: one fiber point run through the whole column.
  {
    std::vector<double> upper_fraction(sample_count, 0.0);
    std::vector<std::vector<std::uint8_t>> bits(sample_count, std::vector<std::uint8_t>(m, 0));
    const auto* cocycle = sn.cocycle().get();
    parallel_for(sample_count, [&](std::size_t i) {
      const std::size_t c = sample_column[i];
      if (sn.source() == BlockSource::cocycle) {
        const std::uint32_t half = cocycle->cells() / 2;
        auto u = static_cast<std::uint32_t>(derive_seed(seed, {5, i}) & (cocycle->cells() - 1));
        const std::size_t base = tower.base_positions[c];
        for (std::size_t l = 0; l < m * M; ++l) {
          if (l % M == 0) bits[i][l / M] = u >= half;
          if (base + l < cocycle->steps()) u = cocycle->apply(base + l, u);
        }
      } else {
        for (std::size_t j = 0; j < m; ++j) bits[i][j] = sn.block(c, j, sample_replica[i]) & 1U;
      }
      std::size_t ones = 0;
      for (auto b : bits[i]) ones += b;
      upper_fraction[i] = static_cast<double>(ones) / static_cast<double>(m);
    });
    rep.checks.push_back(mean_check("level_upper_half_measure", upper_fraction, 0.5, lemma_mode));
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t ones = 0;
      for (std::size_t i = 0; i < sample_count; ++i) ones += bits[i][j];
      worst = std::max(worst, std::abs(static_cast<double>(ones) / static_cast<double>(sample_count) - 0.5));
    }
    BoundCheck level;
    level.name = "level_upper_half_max_deviation";
    level.estimate = worst;
    level.bound = 0.0;
    level.sigma = 0.5 / std::sqrt(static_cast<double>(sample_count));
    level.relation = "info";
    level.asserted = false;
    level.pass = true;
    rep.checks.push_back(level);
  }

  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const BoundCheck& c) { return !c.asserted || c.pass; });
  return rep;
}

nlohmann::json to_json(const BallBoundReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"estimate", c.estimate},
                      {"bound", c.bound},
                      {"sigma", c.sigma},
                      {"relation", c.relation},
                      {"asserted", c.asserted},
                      {"verdict", c.pass ? "pass" : "fail"}});
  }
  return {{"epsilon", r.epsilon},
          {"M", r.M},
          {"m", r.m},
          {"sample_count", r.sample_count},
          {"mode", r.lemma_mode ? "lemma" : "exploratory"},
          {"checks", checks},
          {"verdict", r.pass ? "pass" : "fail"}};
}

// --- sparse intervals -------------------------------------------------------------------

SparseIntervalResult sparse_interval_lemma(std::span<const std::size_t> A, std::size_t m,
                                           std::size_t M, double epsilon) {
  if (m == 0 || M == 0) throw PreconditionError("sparse_interval_lemma: m and M must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("sparse_interval_lemma: epsilon must lie in (0, 1)");
  std::vector<std::size_t> a(A.begin(), A.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  const std::size_t n = m * M;
  if (!a.empty() && a.back() >= n) throw PreconditionError("sparse_interval_lemma: A must lie in [0, mM)");
  if (static_cast<double>(a.size()) > epsilon * static_cast<double>(n) + 1e-9) {
    throw PreconditionError("sparse_interval_lemma: |A| = " + std::to_string(a.size()) +
                            " exceeds eps m M");
  }
  std::vector<std::size_t> per_block(m, 0);
  for (auto x : a) ++per_block[x / M];
  const double threshold = std::sqrt(epsilon) * static_cast<double>(M);
  SparseIntervalResult out;
  for (std::size_t j = 0; j < m; ++j) {
    if (static_cast<double>(per_block[j]) < threshold) out.J.push_back(j);
  }
  out.bound = (1.0 - std::sqrt(epsilon)) * static_cast<double>(m);
  out.strict_bound_holds = static_cast<double>(out.J.size()) > out.bound;
  return out;
}

}  // namespace slowent
