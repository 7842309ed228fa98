#include "slowent/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "slowent/error.hpp"
#include "slowent/parallel.hpp"
#include "slowent/window_index.hpp"

namespace slowent {
namespace {

void require_same_length(const WeightedSample& s, std::size_t n, const char* who) {
  if (s.word_length() != n) {
    throw LengthMismatch(std::string(who) + ": word length " + std::to_string(n) +
                         " differs from sample word length " + std::to_string(s.word_length()));
  }
}

// Coverage target: uncovered weight strictly below delta, or no weight left
// at all (the latter makes delta = 0 meaningful).
bool target_reached(double uncovered, double delta) {
  return uncovered < delta || uncovered == 0.0;
}

class BitMatrix {
 public:
  BitMatrix(std::size_t rows, std::size_t cols)
      : stride_((cols + 63) / 64), bits_(rows * stride_, 0) {}
  void set(std::size_t r, std::size_t c) { bits_[r * stride_ + c / 64] |= std::uint64_t{1} << (c % 64); }
  const std::uint64_t* row(std::size_t r) const { return bits_.data() + r * stride_; }
  std::size_t stride() const { return stride_; }

 private:
  std::size_t stride_;
  std::vector<std::uint64_t> bits_;
};

template <class F>
void for_each_bit(const std::uint64_t* words, std::size_t count, F&& f) {
  for (std::size_t b = 0; b < count; ++b) {
    std::uint64_t x = words[b];
    while (x != 0) {
      f(b * 64 + static_cast<std::size_t>(std::countr_zero(x)));
      x &= x - 1;
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

WeightedSample::WeightedSample(std::vector<BinaryWord> words, std::vector<double> weights)
    : words_(std::move(words)), weights_(std::move(weights)) {
  if (words_.empty()) throw PreconditionError("WeightedSample: empty sample");
  if (words_.size() != weights_.size()) {
    throw LengthMismatch("WeightedSample: words and weights differ in count");
  }
  const std::size_t n = words_.front().size();
  double total = 0.0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].size() != n) throw LengthMismatch("WeightedSample: words differ in length");
    if (!(weights_[i] >= 0.0)) throw PreconditionError("WeightedSample: negative weight");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("WeightedSample: weights must sum to 1");
}

WeightedSample WeightedSample::uniform(std::vector<BinaryWord> words) {
  if (words.empty()) throw PreconditionError("WeightedSample: empty sample");
  std::vector<double> weights(words.size(), 1.0 / static_cast<double>(words.size()));
  return WeightedSample(std::move(words), std::move(weights));
}

void CoverParams::validate() const {
  if (n == 0) throw DomainError("CoverParams: n must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("CoverParams: epsilon must lie in (0, 1)");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("CoverParams: delta must lie in [0, 1)");
  if (mode == CoverMode::lemma && (epsilon > 0.01 || delta > 0.01 || delta == 0.0)) {
    throw DomainError("CoverParams: lemma mode requires epsilon, delta in (0, 1/100]");
  }
}

std::string to_string(CoverMethod m) {
  switch (m) {
    case CoverMethod::greedy: return "greedy";
    case CoverMethod::exact: return "exact";
    case CoverMethod::block_coding: return "block_coding";
  }
  return "unknown";
}

double ball_mass(const WeightedSample& s, const BinaryWord& center, double epsilon) {
  require_same_length(s, center.size(), "ball_mass");
  if (!(epsilon > 0.0)) throw DomainError("ball_mass: epsilon must be positive");
  const long r = strict_radius_count(center.size(), epsilon);
  double mass = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<long>(mismatch_count(s.words()[i], center)) <= r) mass += s.weights()[i];
  }
  return mass;
}

CoverResult greedy_cover(const WeightedSample& s, const CoverParams& p) {
  p.validate();
  require_same_length(s, p.n, "greedy_cover");
  const std::size_t m = s.size();
  const long r = strict_radius_count(p.n, p.epsilon);
  const auto& w = s.weights();

  BitMatrix adj(m, m);
  parallel_for(m, [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (static_cast<long>(mismatch_count(s.words()[i], s.words()[j])) <= r) adj.set(i, j);
    }
  });

  const std::size_t stride = adj.stride();
  std::vector<std::uint64_t> uncovered(stride, 0);
  for (std::size_t j = 0; j < m; ++j) uncovered[j / 64] |= std::uint64_t{1} << (j % 64);

  auto fresh_gain = [&](std::size_t i) {
    double g = 0.0;
    const std::uint64_t* row = adj.row(i);
    for (std::size_t b = 0; b < stride; ++b) {
      std::uint64_t x = row[b] & uncovered[b];
      while (x != 0) {
        g += w[b * 64 + static_cast<std::size_t>(std::countr_zero(x))];
        x &= x - 1;
      }
    }
    return g;
  };
  auto uncovered_mass = [&] {
    double u = 0.0;
    for_each_bit(uncovered.data(), stride, [&](std::size_t j) { u += w[j]; });
    return u;
  };

  std::vector<double> gain(m);
  for (std::size_t i = 0; i < m; ++i) gain[i] = fresh_gain(i);

  CoverResult result;
  result.method = CoverMethod::greedy;
  std::vector<std::uint64_t> affected(stride);
  while (!target_reached(uncovered_mass(), p.delta)) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i) {
      if (gain[i] > gain[best]) best = i;
    }
    if (!(gain[best] > 0.0)) {
      throw Error("greedy_cover: no center adds coverage (internal invariant broken)");
    }
    result.centers.push_back(best);
    std::fill(affected.begin(), affected.end(), 0);
    const std::uint64_t* row = adj.row(best);
    for (std::size_t b = 0; b < stride; ++b) {
      std::uint64_t fresh = row[b] & uncovered[b];
      uncovered[b] &= ~fresh;
      while (fresh != 0) {
        const std::size_t j = b * 64 + static_cast<std::size_t>(std::countr_zero(fresh));
        const std::uint64_t* nb = adj.row(j);  // adjacency is symmetric
        for (std::size_t c = 0; c < stride; ++c) affected[c] |= nb[c];
        fresh &= fresh - 1;
      }
    }
    for_each_bit(affected.data(), stride, [&](std::size_t i) { gain[i] = fresh_gain(i); });
  }
  result.k = result.centers.size();
  double covered = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (!((uncovered[j / 64] >> (j % 64)) & 1U)) covered += w[j];
  }
  result.covered_mass = covered;
  return result;
}

CoverResult exact_cover_oracle(const WeightedSample& s, const CoverParams& p) {
  p.validate();
  require_same_length(s, p.n, "exact_cover_oracle");
  const std::size_t m = s.size();
  if (m > exact_cover_limit) {
    throw SizeError("exact_cover_oracle: at most " + std::to_string(exact_cover_limit) +
                    " sample words (got " + std::to_string(m) + ")");
  }
  const long r = strict_radius_count(p.n, p.epsilon);
  const auto& w = s.weights();
  std::vector<std::uint32_t> ball(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (static_cast<long>(mismatch_count(s.words()[i], s.words()[j])) <= r) {
        ball[i] |= std::uint32_t{1} << j;
      }
    }
  }
  auto mass_outside = [&](std::uint32_t mask) {
    double u = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (!((mask >> j) & 1U)) u += w[j];
    }
    return u;
  };

  std::vector<std::size_t> chosen;
  // Depth-first enumeration of k-subsets in lexicographic order.
  auto search = [&](auto&& self, std::size_t start, std::size_t remaining, std::uint32_t mask) -> bool {
    if (remaining == 0) return target_reached(mass_outside(mask), p.delta);
    for (std::size_t i = start; i + remaining <= m; ++i) {
      chosen.push_back(i);
      if (self(self, i + 1, remaining - 1, mask | ball[i])) return true;
      chosen.pop_back();
    }
    return false;
  };

  for (std::size_t k = 1; k <= m; ++k) {
    chosen.clear();
    if (search(search, 0, k, 0U)) {
      std::uint32_t mask = 0;
      for (auto c : chosen) mask |= ball[c];
      CoverResult result;
      result.method = CoverMethod::exact;
      result.centers = chosen;
      result.k = k;
      double covered = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if ((mask >> j) & 1U) covered += w[j];
      }
      result.covered_mass = covered;
      return result;
    }
  }
  throw Error("exact_cover_oracle: no cover found (internal invariant broken)");
}

std::vector<std::size_t> separated_family(const WeightedSample& s, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("packing: epsilon must be positive");
  const std::size_t n = s.word_length();
  // d / n >= 2 epsilon  <=>  d exceeds the strict 2 epsilon radius count.
  const long r2 = strict_radius_count(n, 2.0 * epsilon);
  std::vector<std::size_t> family;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s.weights()[i] > 0.0)) continue;
    bool separated = true;
    for (auto f : family) {
      if (static_cast<long>(mismatch_count(s.words()[i], s.words()[f])) <= r2) {
        separated = false;
        break;
      }
    }
    if (separated) family.push_back(i);
  }
  return family;
}

std::size_t packing_lower_bound(const WeightedSample& s, double epsilon, double delta) {
  const auto family = separated_family(s, epsilon);
  std::vector<double> fw;
  fw.reserve(family.size());
  for (auto f : family) fw.push_back(s.weights()[f]);
  std::sort(fw.begin(), fw.end());
  const std::size_t P = fw.size();
  // Largest j such that the j lightest family points could be all that is
  // left uncovered.
  std::size_t j_max = 0;
  double prefix = 0.0;
  for (std::size_t j = 1; j <= P; ++j) {
    prefix += fw[j - 1];
    if (target_reached(prefix, delta)) {
      j_max = j;
    } else {
      break;
    }
  }
  return std::max<std::size_t>(P - j_max, 1);
}

namespace {

BlockCodingCover block_cover_impl(const Orbit& base, const WindowCode& code,
                                  const BinaryWord* q_names, const CoverParams& p) {
  p.validate();
  const std::size_t L = base.symbols.size();
  const std::size_t k0 = code.half_width();
  const std::size_t n = p.n;
  const std::size_t width = n + 2 * k0 + 1;
  if (width > L) {
    throw PreconditionError("block_coding_cover: n + 2k0 + 1 = " + std::to_string(width) +
                            " exceeds orbit length " + std::to_string(L));
  }
  if (q_names && q_names->size() != L) {
    throw LengthMismatch("block_coding_cover: Q stream must align with the base orbit");
  }
  const BinaryWord coded = window_code_partition(base, code);
  const std::size_t positions = L - width + 1;
  std::size_t atoms_total = 0;
  const std::vector<std::uint32_t> ids = window_ids(base.symbols, width, &atoms_total);

  std::vector<std::uint64_t> qbuf, qhat_buf;
  auto q_name = [&](std::size_t s, std::vector<std::uint64_t>& out) {
    if (q_names) {
      q_names->copy_window(s + k0, n, out);
    } else {
      coded.copy_window(s, n, out);
    }
  };
  auto mismatches = [](const std::vector<std::uint64_t>& a, const std::uint64_t* b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
    return d;
  };

  const long r1 = strict_radius_count(n, p.epsilon);
  const long r2 = strict_radius_count(n, 2.0 * p.epsilon);
  const std::size_t nb = (n + 63) / 64;

  // Pass 1: membership in A and one center per atom (first position in A).
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> center_of_atom(atoms_total, kNone);
  std::size_t good = 0;
  for (std::size_t s = 0; s < positions; ++s) {
    q_name(s, qbuf);
    coded.copy_window(s, n, qhat_buf);
    if (static_cast<long>(mismatches(qbuf, qhat_buf.data())) <= r1) {
      ++good;
      if (center_of_atom[ids[s]] == kNone) center_of_atom[ids[s]] = static_cast<std::uint32_t>(s);
    }
  }

  BlockCodingCover out;
  out.sample_positions = positions;
  out.good_mass = static_cast<double>(good) / static_cast<double>(positions);
  std::vector<std::uint32_t> atom_slot(atoms_total, kNone);
  std::vector<std::uint64_t> center_names;
  for (std::size_t a = 0; a < atoms_total; ++a) {
    if (center_of_atom[a] == kNone) continue;
    atom_slot[a] = static_cast<std::uint32_t>(out.cover.centers.size());
    out.cover.centers.push_back(center_of_atom[a]);
    q_name(center_of_atom[a], qbuf);
    center_names.insert(center_names.end(), qbuf.begin(), qbuf.end());
  }
  // Centers listed in position order.
  {
    std::vector<std::size_t> order(out.cover.centers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return out.cover.centers[a] < out.cover.centers[b];
    });
    std::vector<std::size_t> sorted_centers;
    std::vector<std::uint64_t> sorted_names;
    std::vector<std::uint32_t> remap(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      remap[order[i]] = static_cast<std::uint32_t>(i);
      sorted_centers.push_back(out.cover.centers[order[i]]);
      sorted_names.insert(sorted_names.end(), center_names.begin() + static_cast<long>(order[i] * nb),
                          center_names.begin() + static_cast<long>((order[i] + 1) * nb));
    }
    for (auto& slot : atom_slot) {
      if (slot != kNone) slot = remap[slot];
    }
    out.cover.centers = std::move(sorted_centers);
    center_names = std::move(sorted_names);
  }
  const std::size_t ell = out.cover.centers.size();
  out.atom_count = ell;

  // Pass 2: coverage of every sample point by the union of balls.
  std::size_t covered1 = 0, covered2 = 0;
  for (std::size_t s = 0; s < positions; ++s) {
    q_name(s, qbuf);
    long own = std::numeric_limits<long>::max();
    if (atom_slot[ids[s]] != kNone) {
      own = static_cast<long>(mismatches(qbuf, center_names.data() + atom_slot[ids[s]] * nb));
    }
    bool in1 = own <= r1;
    bool in2 = own <= r2;
    for (std::size_t c = 0; c < ell && !(in1 && in2); ++c) {
      const auto d = static_cast<long>(mismatches(qbuf, center_names.data() + c * nb));
      in1 = in1 || d <= r1;
      in2 = in2 || d <= r2;
    }
    covered1 += in1 ? 1 : 0;
    covered2 += in2 ? 1 : 0;
  }
  out.cover.method = CoverMethod::block_coding;
  out.cover.k = ell;
  out.cover.covered_mass = static_cast<double>(covered1) / static_cast<double>(positions);
  out.covered_mass_double_radius = static_cast<double>(covered2) / static_cast<double>(positions);
  out.lemma_precondition_met = out.cover.covered_mass > 1.0 - p.delta;
  return out;
}

}  // namespace

BlockCodingCover block_coding_cover(const Orbit& base, const WindowCode& code,
                                    const CoverParams& p) {
  return block_cover_impl(base, code, nullptr, p);
}

BlockCodingCover block_coding_cover(const Orbit& base, const WindowCode& code,
                                    const BinaryWord& q_names, const CoverParams& p) {
  return block_cover_impl(base, code, &q_names, p);
}

std::string to_string(Separation s) {
  return s == Separation::inside_U ? "inside_U" : "not_certified";
}

Separation separation_check(std::size_t base_complexity_2n, std::size_t cover_lb) {
  return cover_lb > 2 * base_complexity_2n ? Separation::inside_U : Separation::not_certified;
}

std::string cover_csv_header() { return "method,n,epsilon,delta,k,covered_mass,seed"; }

std::string cover_csv_row(const CoverResult& r, const CoverParams& p, std::uint64_t seed) {
  return to_string(r.method) + "," + std::to_string(p.n) + "," + format_double(p.epsilon) + "," +
         format_double(p.delta) + "," + std::to_string(r.k) + "," + format_double(r.covered_mass) +
         "," + std::to_string(seed);
}

}  // namespace slowent
