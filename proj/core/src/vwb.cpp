#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "slowent/error.hpp"
#include "slowent/parallel.hpp"
#include "slowent/transport.hpp"

namespace slowent {
namespace {

constexpr std::size_t kMaxFuture = 20;
constexpr std::size_t kMaxContext = 21;  // A and B together use 3k + 1 key bits

struct Context {
  std::uint64_t key = 0;
  std::size_t count = 0;
  // Sparse future histogram, sorted by future word.
  std::vector<std::pair<std::uint32_t, std::size_t>> futures;
};

struct Group {
  std::size_t begin = 0;  // retained contexts [begin, end) sharing one B
  std::size_t end = 0;
};

struct GroupResult {
  double max_ss = 0.0;
  double weighted_ss = 0.0;  // sum of count * distance
  std::size_t compared_ss = 0;
  double max_sss = 0.0;
  double weighted_sss = 0.0;  // sum of count_i * count_j * distance
  double pair_weight_sss = 0.0;
  std::size_t compared_sss = 0;
};

NameDistribution to_distribution(const std::vector<std::pair<std::uint32_t, double>>& masses,
                                 std::size_t n) {
  std::vector<BinaryWord> support;
  std::vector<double> probs;
  for (const auto& [word, mass] : masses) {
    support.push_back(BinaryWord::from_uint(word, n));
    probs.push_back(mass);
  }
  return NameDistribution(std::move(support), std::move(probs));
}

// Transport distance between two sparse histograms over N-bit futures.
class FutureDistance {
 public:
  explicit FutureDistance(std::size_t n) : n_(n) {
    if (n_ <= 10) excess_.assign(std::size_t{1} << n_, 0.0);
  }

  double operator()(const std::vector<std::pair<std::uint32_t, double>>& p,
                    const std::vector<std::pair<std::uint32_t, double>>& q) {
    if (n_ <= 10) {
      for (const auto& [w, m] : p) excess_[w] += m;
      for (const auto& [w, m] : q) excess_[w] -= m;
      const double d = hypercube_transport(excess_, static_cast<unsigned>(n_));
      for (const auto& [w, m] : p) excess_[w] = 0.0;
      for (const auto& [w, m] : q) excess_[w] = 0.0;
      return d;
    }
    const auto pd = to_distribution(p, n_);
    const auto qd = to_distribution(q, n_);
    // Beyond the exact solver's size the greedy plan is an upper bound, which
    // can only push the verdict toward fail.
    if (pd.size() + qd.size() > dbar_exact_support_limit) return dbar_dist_greedy(pd, qd);
    return dbar_dist_bipartite(pd, qd);
  }

 private:
  std::size_t n_;
  std::vector<double> excess_;
};

std::vector<std::pair<std::uint32_t, double>> normalized(const Context& c) {
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(c.futures.size());
  const double total = static_cast<double>(c.count);
  for (const auto& [w, cnt] : c.futures) out.emplace_back(w, static_cast<double>(cnt) / total);
  return out;
}

struct Tabulation {
  std::size_t positions = 0;
  double min_atom_mass = 0.0;
  std::vector<Context> retained;
  std::vector<Group> groups;
  double good_mass = 0.0;
};

Tabulation tabulate(const BinaryWord& r, const BinaryWord& r0, const VwbParams& p) {
  p.validate();
  if (r.size() != r0.size()) {
    throw LengthMismatch("vwb_test: the R and R0 streams must share one time axis");
  }
  const std::size_t k = p.k;
  const std::size_t n = p.N;
  const std::size_t len = r.size();
  if (len < 10 * (2 * k + n + 1)) {
    throw SizeError("vwb_test: stream length " + std::to_string(len) + " is below 10 (2k + N + 1) = " +
                    std::to_string(10 * (2 * k + n + 1)));
  }
  // Admissible t: t - k >= 0, t + k < len, t + N <= len.
  const std::size_t last = len - std::max(k + 1, n);
  Tabulation tab;
  tab.positions = last - k + 1;
  tab.min_atom_mass = p.min_atom_mass.value_or(
      std::clamp(10.0 * std::ldexp(1.0, static_cast<int>(n)) / static_cast<double>(tab.positions),
                 1e-5, 0.01));

  std::vector<std::pair<std::uint64_t, std::uint32_t>> rows(tab.positions);
  for (std::size_t t = k; t <= last; ++t) {
    const std::uint64_t a = r.window(t - k, k);
    const std::uint64_t b = r0.window(t - k, 2 * k + 1);
    rows[t - k] = {(b << k) | a, static_cast<std::uint32_t>(r.window(t, n))};
  }
  std::sort(rows.begin(), rows.end());

  const double positions = static_cast<double>(tab.positions);
  std::size_t retained_count = 0;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].first == rows[i].first) ++j;
    const std::size_t count = j - i;
    if (static_cast<double>(count) / positions >= tab.min_atom_mass) {
      Context c;
      c.key = rows[i].first;
      c.count = count;
      for (std::size_t x = i; x < j;) {
        std::size_t y = x;
        while (y < j && rows[y].second == rows[x].second) ++y;
        c.futures.emplace_back(rows[x].second, y - x);
        x = y;
      }
      retained_count += count;
      tab.retained.push_back(std::move(c));
    }
    i = j;
  }
  tab.good_mass = static_cast<double>(retained_count) / positions;

  for (std::size_t i = 0; i < tab.retained.size();) {
    std::size_t j = i;
    const std::uint64_t b = tab.retained[i].key >> k;
    while (j < tab.retained.size() && (tab.retained[j].key >> k) == b) ++j;
    tab.groups.push_back({i, j});
    i = j;
  }
  return tab;
}

GroupResult evaluate_group(const Tabulation& tab, const Group& g, std::size_t n, bool star_star,
                           bool star_star_star) {
  GroupResult out;
  FutureDistance dist(n);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> conditionals;
  std::size_t group_count = 0;
  for (std::size_t i = g.begin; i < g.end; ++i) {
    conditionals.push_back(normalized(tab.retained[i]));
    group_count += tab.retained[i].count;
  }
  if (star_star) {
    // dist(.|B): the mixture of the retained conditionals sharing B.
    std::vector<std::pair<std::uint32_t, std::size_t>> merged;
    for (std::size_t i = g.begin; i < g.end; ++i) {
      merged.insert(merged.end(), tab.retained[i].futures.begin(), tab.retained[i].futures.end());
    }
    std::sort(merged.begin(), merged.end());
    std::vector<std::pair<std::uint32_t, double>> mixture;
    for (const auto& [w, cnt] : merged) {
      if (!mixture.empty() && mixture.back().first == w) {
        mixture.back().second += static_cast<double>(cnt);
      } else {
        mixture.emplace_back(w, static_cast<double>(cnt));
      }
    }
    for (auto& entry : mixture) entry.second /= static_cast<double>(group_count);
    for (std::size_t i = 0; i < conditionals.size(); ++i) {
      const double d = g.end - g.begin == 1 ? 0.0 : dist(conditionals[i], mixture);
      out.max_ss = std::max(out.max_ss, d);
      out.weighted_ss += static_cast<double>(tab.retained[g.begin + i].count) * d;
      ++out.compared_ss;
    }
  }
  if (star_star_star) {
    for (std::size_t i = 0; i < conditionals.size(); ++i) {
      for (std::size_t j = i + 1; j < conditionals.size(); ++j) {
        const double d = dist(conditionals[i], conditionals[j]);
        const double w = static_cast<double>(tab.retained[g.begin + i].count) *
                         static_cast<double>(tab.retained[g.begin + j].count);
        out.max_sss = std::max(out.max_sss, d);
        out.weighted_sss += w * d;
        out.pair_weight_sss += w;
        ++out.compared_sss;
      }
    }
  }
  return out;
}

VwbReport base_report(const Tabulation& tab, const VwbParams& p, VwbVariant v) {
  VwbReport rep;
  rep.variant = v;
  rep.epsilon = p.epsilon;
  rep.N = p.N;
  rep.k = p.k;
  rep.min_atom_mass = tab.min_atom_mass;
  rep.positions = tab.positions;
  rep.good_mass = tab.good_mass;
  rep.retained_atoms = tab.retained.size();
  rep.excluded_mass = 1.0 - tab.good_mass;
  return rep;
}

void finish(VwbReport& rep) {
  rep.pass = rep.good_mass > 1.0 - rep.epsilon && rep.max_dbar < rep.epsilon;
}

std::pair<VwbReport, VwbReport> run(const BinaryWord& r, const BinaryWord& r0, const VwbParams& p,
                                    bool star_star, bool star_star_star) {
  const Tabulation tab = tabulate(r, r0, p);
  std::vector<GroupResult> results(tab.groups.size());
  parallel_for(tab.groups.size(), [&](std::size_t i) {
    results[i] = evaluate_group(tab, tab.groups[i], p.N, star_star, star_star_star);
  });

  VwbReport ss = base_report(tab, p, VwbVariant::star_star);
  VwbReport sss = base_report(tab, p, VwbVariant::star_star_star);
  double ss_weight = 0.0;
  double sss_weight = 0.0;
  for (const auto& g : results) {
    ss.max_dbar = std::max(ss.max_dbar, g.max_ss);
    ss.mean_dbar += g.weighted_ss;
    ss.compared += g.compared_ss;
    sss.max_dbar = std::max(sss.max_dbar, g.max_sss);
    sss.mean_dbar += g.weighted_sss;
    sss_weight += g.pair_weight_sss;
    sss.compared += g.compared_sss;
  }
  for (const auto& c : tab.retained) ss_weight += static_cast<double>(c.count);
  ss.mean_dbar = ss_weight > 0.0 ? ss.mean_dbar / ss_weight : 0.0;
  sss.mean_dbar = sss_weight > 0.0 ? sss.mean_dbar / sss_weight : 0.0;
  finish(ss);
  finish(sss);
  return {ss, sss};
}

}  // namespace

void VwbParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("VwbParams: epsilon must lie in (0, 1)");
  if (N < 1 || N > kMaxFuture) throw SizeError("VwbParams: N must lie in [1, 20]");
  if (k < 1 || k > kMaxContext) throw SizeError("VwbParams: k must lie in [1, 21]");
  if (min_atom_mass && !(*min_atom_mass > 0.0 && *min_atom_mass < 0.1)) {
    throw DomainError("VwbParams: min_atom_mass must lie in (0, 0.1)");
  }
}

std::string to_string(VwbVariant v) {
  return v == VwbVariant::star_star ? "star_star" : "star_star_star";
}

nlohmann::json to_json(const VwbReport& r) {
  return {
      {"variant", to_string(r.variant)},
      {"epsilon", r.epsilon},
      {"N", r.N},
      {"k", r.k},
      {"min_atom_mass", r.min_atom_mass},
      {"positions", r.positions},
      {"good_mass", r.good_mass},
      {"max_dbar", r.max_dbar},
      {"mean_dbar", r.mean_dbar},
      {"retained_atoms", r.retained_atoms},
      {"compared", r.compared},
      {"excluded_mass", r.excluded_mass},
      {"verdict", r.pass ? "pass" : "fail"},
  };
}

VwbReport vwb_test(const BinaryWord& r_names, const BinaryWord& r0_names, const VwbParams& p,
                   VwbVariant variant) {
  const bool ss = variant == VwbVariant::star_star;
  auto both = run(r_names, r0_names, p, ss, !ss);
  return ss ? both.first : both.second;
}

std::pair<VwbReport, VwbReport> vwb_test_both(const BinaryWord& r_names,
                                              const BinaryWord& r0_names, const VwbParams& p) {
  return run(r_names, r0_names, p, true, true);
}

}  // namespace slowent
