#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "slowent/models.hpp"
#include "slowent/words.hpp"

namespace slowent {

/// Empirical measure: equal-length words with nonnegative weights summing
/// to 1 (within 1e-12).
class WeightedSample {
 public:
  WeightedSample(std::vector<BinaryWord> words, std::vector<double> weights);
  static WeightedSample uniform(std::vector<BinaryWord> words);

  const std::vector<BinaryWord>& words() const noexcept { return words_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return words_.size(); }
  std::size_t word_length() const noexcept { return words_.front().size(); }

 private:
  std::vector<BinaryWord> words_;
  std::vector<double> weights_;
};

enum class CoverMode {
  lemma,        ///< epsilon, delta <= 1/100 enforced
  exploratory,  ///< any epsilon, delta in (0, 1)
};

struct CoverParams {
  double epsilon = 0.01;
  double delta = 0.01;
  std::size_t n = 1;
  CoverMode mode = CoverMode::exploratory;

  /// Throws DomainError when the fields violate the mode's ranges.
  void validate() const;
};

enum class CoverMethod { greedy, exact, block_coding };
std::string to_string(CoverMethod m);

struct CoverResult {
  std::vector<std::size_t> centers;  ///< sample indices (orbit positions for block_coding)
  std::size_t k = 0;
  double covered_mass = 0.0;
  CoverMethod method = CoverMethod::greedy;
};

/// Weight of sample words strictly within d-bar distance epsilon of center.
double ball_mass(const WeightedSample& s, const BinaryWord& center, double epsilon);

/// Greedy set cover with centers restricted to sample words: repeatedly
/// takes the word whose epsilon-ball holds the most uncovered weight
/// (lowest index on ties) until the uncovered weight drops below delta, or
/// nothing is left uncovered. k upper-bounds the sample covering number.
CoverResult greedy_cover(const WeightedSample& s, const CoverParams& p);

/// Smallest k (and the lexicographically first center set achieving it)
/// by exhaustive subset search. At most 24 sample words.
CoverResult exact_cover_oracle(const WeightedSample& s, const CoverParams& p);

constexpr std::size_t exact_cover_limit = 24;

/// Indices of a maximal family of positive-weight words that are pairwise
/// at d-bar distance >= 2 epsilon, taken greedily in index order.
std::vector<std::size_t> separated_family(const WeightedSample& s, double epsilon);

/// Lower bound on the number of epsilon-balls (centered anywhere) needed to
/// leave uncovered weight below delta. A ball meets at most one point of a
/// 2 epsilon-separated family, so k balls leave at least the P - k lightest
/// family points uncovered; the bound is the least k for which that residue
/// can fall below delta (and at least 1).
std::size_t packing_lower_bound(const WeightedSample& s, double epsilon, double delta);

struct BlockCodingCover {
  CoverResult cover;                      ///< centers are sample positions
  std::size_t atom_count = 0;             ///< distinct (n + 2k0 + 1)-windows meeting A
  std::size_t sample_positions = 0;
  double good_mass = 0.0;                 ///< mass of A = {d(Q_n, Qhat_n) < epsilon}
  double covered_mass_double_radius = 0.0;
  bool lemma_precondition_met = false;    ///< covered mass at epsilon > 1 - delta
};

/// Constructive base cover. Sample point s (uniform over positions) has
/// coded name Qhat_n(s) = code output [s, s + n) and atom given by the base
/// window [s, s + n + 2k0 + 1). One center is taken per atom that meets A,
/// and coverage is measured at radius epsilon and 2 epsilon.
/// Here Q is the coded partition itself.
BlockCodingCover block_coding_cover(const Orbit& base, const WindowCode& code,
                                    const CoverParams& p);

/// Same, with Q given explicitly as a stream aligned with the base orbit
/// (q_names[t] is the Q-symbol at time t).
BlockCodingCover block_coding_cover(const Orbit& base, const WindowCode& code,
                                    const BinaryWord& q_names, const CoverParams& p);

enum class Separation { inside_U, not_certified };
std::string to_string(Separation s);

/// inside_U iff cover_lb > 2 a_{2n}.
Separation separation_check(std::size_t base_complexity_2n, std::size_t cover_lb);

/// "method,n,epsilon,delta,k,covered_mass,seed"
std::string cover_csv_header();
std::string cover_csv_row(const CoverResult& r, const CoverParams& p, std::uint64_t seed);

}  // namespace slowent
