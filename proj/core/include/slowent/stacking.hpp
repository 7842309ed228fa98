#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slowent/models.hpp"
#include "slowent/words.hpp"

namespace slowent {

// --- towers ---------------------------------------------------------------

/// Two-height tiling of the orbit index range [0, length) by columns
/// [base, base + height), height in {h, h + 1}.
struct RokhlinTower {
  std::size_t length = 0;
  std::size_t h = 0;
  std::vector<std::size_t> base_positions;  ///< sorted
  std::vector<std::size_t> column_heights;

  std::size_t column_count() const noexcept { return base_positions.size(); }
  /// Column containing orbit index t (binary search).
  std::size_t column_of(std::size_t t) const;
  /// True iff the columns partition [0, length) exactly.
  bool tiles_exactly() const;
};

/// b = L mod h columns of height h + 1 followed by (L - b (h + 1)) / h
/// columns of height h. Requires L >= h (h + 1).
RokhlinTower build_tower(std::size_t length, std::size_t h);

/// Same multiset of heights in a seeded random column order.
RokhlinTower build_tower(std::size_t length, std::size_t h, std::uint64_t shuffle_seed);

nlohmann::json to_json(const RokhlinTower& t);

// --- dyadic cocycles --------------------------------------------------------

/// Per-step permutations of the 2^d dyadic fiber cells. Steps index into a
/// table of distinct permutations, so long orbits do not store 2^d entries
/// per step.
class DyadicCocycle {
 public:
  /// table[i] must be a permutation of {0, ..., 2^d - 1}; step_index[t]
  /// selects the permutation applied at time t.
  DyadicCocycle(unsigned d, std::vector<std::vector<std::uint32_t>> table,
                std::vector<std::uint32_t> step_index);

  static DyadicCocycle identity(unsigned d, std::size_t steps);
  /// u -> u xor 2^(d-1) at every step: swaps the lower and upper halves.
  static DyadicCocycle half_swap(unsigned d, std::size_t steps);
  /// Each step draws one of `table_size` independent uniform permutations.
  static DyadicCocycle random(unsigned d, std::size_t steps, std::uint64_t seed,
                              std::size_t table_size = 64);
  /// S_x depends on the current base symbol: perm0 where x_t = 0, perm1 where
  /// x_t = 1.
  static DyadicCocycle from_base_symbols(unsigned d, const BinaryWord& base,
                                         std::vector<std::uint32_t> perm0,
                                         std::vector<std::uint32_t> perm1);

  unsigned resolution() const noexcept { return d_; }
  std::uint32_t cells() const noexcept { return std::uint32_t{1} << d_; }
  std::size_t steps() const noexcept { return step_index_.size(); }
  std::span<const std::uint32_t> perm(std::size_t t) const { return table_[step_index_[t]]; }
  std::uint32_t apply(std::size_t t, std::uint32_t u) const { return table_[step_index_[t]][u]; }

 private:
  unsigned d_;
  std::vector<std::vector<std::uint32_t>> table_;
  std::vector<std::uint32_t> step_index_;
};

/// Fiber Q-name of length n: u_{t+1} = perms[start + t](u_t), symbol t is 1
/// iff u_t lies in the upper half. The base orbit only fixes the time axis
/// (n <= base length).
BinaryWord skew_names(const Orbit& base, const DyadicCocycle& c, std::uint32_t u0, std::size_t n,
                      std::size_t start = 0);

// --- stacked names ------------------------------------------------------------

enum class BlockSource {
  uniform_words,    ///< independent uniform M-word per (column, block, fiber point)
  identity,         ///< unmodified identity cocycle: one constant symbol per fiber point
  repeated_blocks,  ///< one uniform M-word per column, repeated in every block (adversarial)
  cocycle,          ///< cocycle skew names with the fiber cell resampled at each block start
};
std::string to_string(BlockSource s);

/// Fiber names over a tower with h = mM, generated on demand. A point of
/// Y is (orbit index, replica); each replica is an independent fiber point.
/// Column c of height mM + r splits into m complete M-blocks plus an r-level
/// remainder that behaves like a truncated block.
class StackedNames {
 public:
  StackedNames(RokhlinTower tower, std::size_t M, std::uint64_t seed, BlockSource source,
               std::shared_ptr<const DyadicCocycle> cocycle = nullptr);

  const RokhlinTower& tower() const noexcept { return tower_; }
  std::size_t M() const noexcept { return M_; }
  std::size_t m() const noexcept { return m_; }
  BlockSource source() const noexcept { return source_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::shared_ptr<const DyadicCocycle>& cocycle() const noexcept { return cocycle_; }

  /// Block j of a column as an integer, symbol i in bit i. Block m (the
  /// remainder of an (h + 1)-column) has height - mM symbols.
  std::uint64_t block(std::size_t column, std::size_t j, std::uint64_t replica) const;
  /// The full column name (height symbols).
  BinaryWord column_name(std::size_t column, std::uint64_t replica) const;
  /// n-name of the point at `level` of `column`, continuing through the
  /// following columns (wrapping after the last).
  BinaryWord name_from(std::size_t column, std::size_t level, std::uint64_t replica,
                       std::size_t n) const;
  /// n-name of orbit index t.
  BinaryWord name_at(std::size_t t, std::uint64_t replica, std::size_t n) const;

 private:
  std::size_t block_length(std::size_t column, std::size_t j) const;

  RokhlinTower tower_;
  std::size_t M_;
  std::size_t m_;
  std::uint64_t seed_;
  BlockSource source_;
  std::shared_ptr<const DyadicCocycle> cocycle_;
};

/// Independent cutting and stacking: uniform M-words in every block.
/// M must divide h and be at most 64.
StackedNames independent_stack_names(const RokhlinTower& tower, std::size_t M, std::uint64_t seed);

// --- block independence -------------------------------------------------------

struct BlockPairMi {
  std::size_t j = 0;
  std::size_t j2 = 0;
  double plug_in = 0.0;
  double corrected = 0.0;  ///< Miller-Madow
};

struct IndependenceReport {
  std::size_t columns = 0;
  std::size_t M = 0;
  std::vector<BlockPairMi> pairs;
  double max_plug_in = 0.0;
  double max_corrected = 0.0;
  double threshold = 0.01;
  bool dependent = false;  ///< max_corrected >= threshold
};

/// Empirical mutual information (bits) between block-j and block-j' names
/// across columns (one fiber point per column), for the adjacent pairs (j, j + 1) and the pair (0, m - 1).
/// The plug-in estimate is biased upward by about (2^M - 1)^2 / (2 n ln 2),
/// which is why the verdict uses the Miller-Madow corrected value.
/// Needs at least max(100, 4^(M+1)) columns; M <= 8.
IndependenceReport check_rj_independence(const StackedNames& sn, double threshold = 0.01);

/// Same statistic on explicit rows (one column name per row, >= m M symbols).
IndependenceReport check_rj_independence(std::span<const BinaryWord> rows, std::size_t M,
                                         std::size_t m, double threshold = 0.01);

nlohmann::json to_json(const IndependenceReport& r);

// --- ball lemmas -----------------------------------------------------------

struct BoundCheck {
  std::string name;
  double estimate = 0.0;
  double bound = 0.0;
  double sigma = 0.0;
  std::string relation = "<=";  ///< "<=": estimate <= bound + 3 sigma; "~=": within 3 sigma; "info": not a test
  bool asserted = true;
  bool pass = true;
};

struct BallBoundReport {
  double epsilon = 0.0;
  std::size_t M = 0;
  std::size_t m = 0;
  std::size_t sample_count = 0;
  bool lemma_mode = true;
  std::vector<BoundCheck> checks;
  bool pass = true;  ///< every asserted check passes
};

/// Monte Carlo checks of the stacked-name ball lemmas:
///  (a) mM-ball around a base point vs 2^{m(-1/2 + H(2 eps))};
///  (b) M-block balls vs 1/2 + 2 eps, for free centers and per-level
///      centers, next to the exact uniform-word ball mass (M <= 20);
///  (c) mean d-bar_M to a fixed center vs 1/2;
///  (d) mM-ball around a mid-column point over all of Y vs
///      2^{floor(m/2)(-1/2 + H(4 eps))};
///  (e) per-level frequency of the upper fiber half vs 1/2 (cocycle source:
///      measured on the skew names before resampling).
/// sigma is the binomial standard deviation at the bound (sample standard
/// error for means). lemma_mode requires eps in (0, 1/4); otherwise checks
/// are reported but not asserted.
BallBoundReport ball_bound_report(const StackedNames& sn, double epsilon, std::size_t sample_count,
                                  std::uint64_t seed, bool lemma_mode = true);

nlohmann::json to_json(const BallBoundReport& r);

/// Exact mass of a strict d-bar ball of radius eps in the uniform measure on
/// {0,1}^n (n <= 1000).
double uniform_ball_mass(std::size_t n, double epsilon);

// --- sparse intervals ---------------------------------------------------------

struct SparseIntervalResult {
  std::vector<std::size_t> J;  ///< sorted block indices
  double bound = 0.0;          ///< (1 - sqrt(eps)) m
  bool strict_bound_holds = false;  ///< |J| > bound
};

/// J = { j : |I_j cap A| < sqrt(eps) M } with I_j = [jM, jM + M).
/// Requires A subset of [0, mM) (duplicates ignored) and |A| <= eps m M.
SparseIntervalResult sparse_interval_lemma(std::span<const std::size_t> A, std::size_t m,
                                           std::size_t M, double epsilon);

}  // namespace slowent
