#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slowent/words.hpp"

namespace slowent {

/// A probability distribution on N-names with a finite support of distinct
/// words; probabilities sum to 1 within 1e-10.
class NameDistribution {
 public:
  NameDistribution(std::vector<BinaryWord> support, std::vector<double> probs);

  static NameDistribution point_mass(BinaryWord w);
  static NameDistribution uniform(std::vector<BinaryWord> support);
  /// Empirical distribution of a list of names (duplicates merged,
  /// support in first-seen order).
  static NameDistribution empirical(std::span<const BinaryWord> names);
  /// lambda P + (1 - lambda) Q on the union of supports.
  static NameDistribution mixture(const NameDistribution& p, const NameDistribution& q,
                                  double lambda);

  const std::vector<BinaryWord>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }
  std::size_t word_length() const noexcept { return support_.front().size(); }

 private:
  std::vector<BinaryWord> support_;
  std::vector<double> probs_;
};

/// Combined support limit of the exact solver.
constexpr std::size_t dbar_exact_support_limit = 512;

/// Exact d-bar distance: the minimum over couplings of the expected
/// normalized Hamming distance. Uses the hypercube-graph route for N <= 10
/// and the bipartite route otherwise. Throws SizeError (pointing at
/// dbar_dist_greedy) when the supports exceed 512 atoms combined.
double dbar_dist(const NameDistribution& p, const NameDistribution& q);

/// Exact transport on the complete bipartite graph between the supports.
double dbar_dist_bipartite(const NameDistribution& p, const NameDistribution& q);

/// Exact transport as an uncapacitated flow on the N-cube, whose path
/// metric is the Hamming distance. N <= 12.
double dbar_dist_hypercube(const NameDistribution& p, const NameDistribution& q);

/// Same route on a dense excess vector: excess[v] = P(v) - Q(v) for every
/// v in {0,1}^N indexed LSB-first. Returns the d-bar cost (already / N).
double hypercube_transport(std::span<const double> excess, unsigned n);

/// Upper bound: northwest-corner plan on lexicographically sorted supports,
/// improved by 2-exchange swaps until no swap lowers the cost.
double dbar_dist_greedy(const NameDistribution& p, const NameDistribution& q);

// --- finite-form relative very weak Bernoulli test -----------------------

struct VwbParams {
  double epsilon = 0.05;
  std::size_t N = 6;   ///< future window
  std::size_t k = 8;   ///< past / context half-width
  /// Estimation floor; default 10 * 2^N / positions clamped to [1e-5, 0.01].
  std::optional<double> min_atom_mass;

  void validate() const;
};

enum class VwbVariant { star_star, star_star_star };
std::string to_string(VwbVariant v);

struct VwbReport {
  VwbVariant variant = VwbVariant::star_star;
  double epsilon = 0.0;
  std::size_t N = 0;
  std::size_t k = 0;
  double min_atom_mass = 0.0;
  std::size_t positions = 0;
  double good_mass = 0.0;
  double max_dbar = 0.0;
  double mean_dbar = 0.0;
  std::size_t retained_atoms = 0;
  std::size_t compared = 0;  ///< distances evaluated
  double excluded_mass = 0.0;
  bool pass = false;
};

nlohmann::json to_json(const VwbReport& r);

/// Slides over the joint stream. At time t the past atom is
/// A = r[t-k, t), the factor atom is B = r0[t-k, t+k] and the future is
/// r[t, t+N). Contexts (A, B) lighter than min_atom_mass are excluded and
/// their mass counts against good_mass. star_star compares dist(.|A,B) with
/// dist(.|B) (the mixture over retained A); star_star_star compares
/// dist(.|A,B) with dist(.|A',B) for all retained A, A' sharing B.
/// pass iff good_mass > 1 - epsilon and max_dbar < epsilon.
VwbReport vwb_test(const BinaryWord& r_names, const BinaryWord& r0_names, const VwbParams& p,
                   VwbVariant variant);

/// Both variants from one tabulation (identical contexts).
std::pair<VwbReport, VwbReport> vwb_test_both(const BinaryWord& r_names,
                                              const BinaryWord& r0_names, const VwbParams& p);

}  // namespace slowent
