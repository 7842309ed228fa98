#include "slowent/models.hpp"

#include <algorithm>
#include <bit>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "slowent/error.hpp"
#include "slowent/random.hpp"
#include "slowent/window_index.hpp"

namespace slowent {
namespace {

__extension__ using u128 = unsigned __int128;
using BigFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;

constexpr std::uint64_t kMinDenominator = std::uint64_t{1} << 40;
constexpr std::uint64_t kMaxDenominator = std::uint64_t{1} << 62;

RotationNumber convergent_of(const BigFloat& value, std::string label) {
  if (!(value > 0 && value < 1)) throw DomainError("rotation number must lie in (0, 1)");
  // h/k run through the convergents of the continued fraction of value.
  u128 h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  BigFloat x = value;
  const BigFloat negligible = boost::multiprecision::ldexp(BigFloat(1), -200);
  for (int step = 0; step < 400; ++step) {
    const BigFloat a_big = boost::multiprecision::floor(x);
    if (a_big > BigFloat(std::uint64_t{1} << 62)) break;
    const auto a = static_cast<u128>(a_big.convert_to<std::uint64_t>());
    const u128 h = a * h_prev + h_prev2;
    const u128 k = a * k_prev + k_prev2;
    if (k >= kMaxDenominator) break;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    if (k >= kMinDenominator) {
      RotationNumber r;
      r.numerator = static_cast<std::uint64_t>(h);
      r.denominator = static_cast<std::uint64_t>(k);
      r.intended_irrational = true;
      r.label = std::move(label);
      return r;
    }
    const BigFloat frac = x - a_big;
    if (frac < negligible) break;
    x = 1 / frac;
  }
  throw DomainError("rotation number '" + label +
                    "' has no convergent with denominator in [2^40, 2^62); "
                    "it is rational (or too well approximable) at this resolution");
}

void check_binary_string(const std::string& s, const char* what) {
  if (s.empty()) throw PreconditionError(std::string(what) + " must be nonempty");
  for (char c : s) {
    if (c != '0' && c != '1') throw PreconditionError(std::string(what) + " must be a 0/1 string");
  }
}

std::string apply_substitution(const Substitution& s, const std::string& w) {
  std::string out;
  for (char c : w) out += s.rules[c == '1' ? 1 : 0];
  return out;
}

BinaryWord string_to_word(const std::string& s) { return BinaryWord::from_string(s); }

std::string expand_substitution(const Substitution& s, std::size_t length) {
  std::string w = "0";
  while (w.size() < length) w = apply_substitution(s, w);
  w.resize(length);
  return w;
}

bool is_quadratic_label(const std::string& label) {
  return label == "golden" || label == "silver" || label.rfind("sqrt:", 0) == 0;
}

std::size_t pattern_period(const std::string& p) {
  // Smallest period of the bi-infinite tiling.
  for (std::size_t d = 1; d <= p.size(); ++d) {
    if (p.size() % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < p.size() && ok; ++i) ok = p[i] == p[i - d];
    if (ok) return d;
  }
  return p.size();
}

}  // namespace

RotationNumber RotationNumber::golden() {
  return convergent_of((boost::multiprecision::sqrt(BigFloat(5)) - 1) / 2, "golden");
}

RotationNumber RotationNumber::silver() {
  return convergent_of(boost::multiprecision::sqrt(BigFloat(2)) - 1, "silver");
}

RotationNumber RotationNumber::sqrt_fraction(unsigned k) {
  const auto root = static_cast<unsigned>(std::sqrt(static_cast<double>(k)));
  for (unsigned r = root > 0 ? root - 1 : 0; r <= root + 1; ++r) {
    if (r * r == k) throw DomainError("sqrt:" + std::to_string(k) + " is rational");
  }
  const BigFloat s = boost::multiprecision::sqrt(BigFloat(k));
  return convergent_of(s - boost::multiprecision::floor(s), "sqrt:" + std::to_string(k));
}

RotationNumber RotationNumber::from_decimal(const std::string& text) {
  BigFloat v;
  try {
    v = BigFloat(text);
  } catch (const std::exception&) {
    throw DomainError("rotation number '" + text + "' is not a decimal number");
  }
  return convergent_of(v, text);
}

RotationNumber RotationNumber::parse(const std::string& text) {
  if (text == "golden") return golden();
  if (text == "silver") return silver();
  if (text.rfind("sqrt:", 0) == 0) {
    const std::string digits = text.substr(5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      throw DomainError("malformed rotation number '" + text + "'");
    }
    return sqrt_fraction(static_cast<unsigned>(std::stoul(digits)));
  }
  return from_decimal(text);
}

ProcessGenerator ProcessGenerator::bernoulli(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("Bernoulli p must lie strictly inside (0, 1)");
  return ProcessGenerator(Bernoulli{p});
}

ProcessGenerator ProcessGenerator::sturmian(RotationNumber alpha, std::optional<double> phase) {
  if (alpha.denominator < kMinDenominator || alpha.numerator == 0 ||
      alpha.numerator >= alpha.denominator) {
    throw DomainError("Sturmian rotation number must be a convergent p/q in (0, 1) with q >= 2^40");
  }
  if (phase && !(*phase >= 0.0 && *phase < 1.0)) {
    throw DomainError("Sturmian phase must lie in [0, 1)");
  }
  return ProcessGenerator(SturmianRotation{std::move(alpha), phase});
}

ProcessGenerator ProcessGenerator::substitution(std::string rule0, std::string rule1) {
  check_binary_string(rule0, "substitution rule for 0");
  check_binary_string(rule1, "substitution rule for 1");
  // m[a][b] = occurrences of b in the image of a.
  std::array<std::array<std::uint64_t, 2>, 2> m{};
  const std::array<const std::string*, 2> rules{&rule0, &rule1};
  for (int a = 0; a < 2; ++a) {
    for (char c : *rules[a]) ++m[a][c == '1' ? 1 : 0];
  }
  std::array<std::array<std::uint64_t, 2>, 2> m2{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) m2[i][j] += m[i][l] * m[l][j];
  // For a 2x2 nonnegative matrix, primitivity is equivalent to M^2 > 0.
  const bool primitive = m2[0][0] > 0 && m2[0][1] > 0 && m2[1][0] > 0 && m2[1][1] > 0;
  if (!primitive) throw PreconditionError("substitution is not primitive");
  if (rule0.size() < 2 && rule1.size() < 2) {
    throw PreconditionError("substitution is not length-growing");
  }
  return ProcessGenerator(Substitution{{std::move(rule0), std::move(rule1)}});
}

ProcessGenerator ProcessGenerator::periodic(std::string pattern) {
  check_binary_string(pattern, "periodic pattern");
  return ProcessGenerator(Periodic{std::move(pattern)});
}

ProcessGenerator ProcessGenerator::product(ProcessGenerator left, ProcessGenerator right,
                                           std::array<std::uint8_t, 4> combiner) {
  for (auto c : combiner) {
    if (c > 1) throw PreconditionError("product combiner entries must be 0 or 1");
  }
  return ProcessGenerator(Product{std::make_shared<const ProcessGenerator>(std::move(left)),
                                  std::make_shared<const ProcessGenerator>(std::move(right)),
                                  combiner});
}

std::string ProcessGenerator::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          os << "bernoulli(p=" << k.p << ")";
        } else if constexpr (std::is_same_v<T, SturmianRotation>) {
          os << "sturmian(alpha=" << k.alpha.label << "~" << k.alpha.numerator << "/"
             << k.alpha.denominator << ",phase=";
          if (k.phase) {
            os << *k.phase;
          } else {
            os << "seeded";
          }
          os << ")";
        } else if constexpr (std::is_same_v<T, Substitution>) {
          os << "substitution(0->" << k.rules[0] << ",1->" << k.rules[1] << ")";
        } else if constexpr (std::is_same_v<T, Periodic>) {
          os << "periodic(" << k.pattern << ")";
        } else {
          os << "product(" << k.left->describe() << "," << k.right->describe() << ",table="
             << int(k.combiner[0]) << int(k.combiner[1]) << int(k.combiner[2])
             << int(k.combiner[3]) << ")";
        }
      },
      kind_);
  return os.str();
}

bool ProcessGenerator::zero_entropy() const {
  return std::visit(
      [](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return false;
        } else if constexpr (std::is_same_v<T, Product>) {
          return k.left->zero_entropy() && k.right->zero_entropy();
        } else {
          return true;
        }
      },
      kind_);
}

Orbit sample_orbit(const ProcessGenerator& g, std::size_t length, std::uint64_t seed) {
  if (length == 0) throw PreconditionError("sample_orbit: length must be positive");
  BinaryWord w = BinaryWord::zeros(length);
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          Rng rng(seed);
          const auto threshold = static_cast<std::uint64_t>(std::ldexp(k.p, 64));
          for (std::size_t i = 0; i < length; ++i) w.set(i, rng() < threshold);
        } else if constexpr (std::is_same_v<T, SturmianRotation>) {
          const std::uint64_t p = k.alpha.numerator;
          const std::uint64_t q = k.alpha.denominator;
          std::uint64_t x = 0;
          if (k.phase) {
            const BigFloat r = boost::multiprecision::floor(BigFloat(*k.phase) * BigFloat(q));
            x = r.convert_to<std::uint64_t>();
          } else {
            x = mix64(seed) % q;
          }
          const std::uint64_t upper = q - p;  // symbol 1 iff x/q in [1 - p/q, 1)
          for (std::size_t i = 0; i < length; ++i) {
            w.set(i, x >= upper);
            x += p;
            if (x >= q) x -= q;
          }
        } else if constexpr (std::is_same_v<T, Substitution>) {
          const std::string s = expand_substitution(k, length);
          for (std::size_t i = 0; i < length; ++i) w.set(i, s[i] == '1');
        } else if constexpr (std::is_same_v<T, Periodic>) {
          for (std::size_t i = 0; i < length; ++i) w.set(i, k.pattern[i % k.pattern.size()] == '1');
        } else {
          const Orbit a = sample_orbit(*k.left, length, derive_seed(seed, 0));
          const Orbit b = sample_orbit(*k.right, length, derive_seed(seed, 1));
          for (std::size_t i = 0; i < length; ++i) {
            w.set(i, k.combiner[(a.symbols[i] ? 2 : 0) + (b.symbols[i] ? 1 : 0)] != 0);
          }
        }
      },
      g.kind());
  return Orbit{std::move(w), g.describe(), seed};
}

std::size_t substitution_language_size(const Substitution& s, std::size_t n) {
  if (n == 0) throw PreconditionError("substitution_language_size: n must be positive");
  // Closure of 2-letter factors under the substitution.
  std::set<std::string> pairs;
  auto add_pairs = [&pairs](const std::string& w) {
    bool grew = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) grew |= pairs.insert(w.substr(i, 2)).second;
    return grew;
  };
  add_pairs(s.rules[0]);
  add_pairs(s.rules[1]);
  for (bool grew = true; grew;) {
    grew = false;
    const std::vector<std::string> current(pairs.begin(), pairs.end());
    for (const auto& w : current) grew |= add_pairs(apply_substitution(s, w));
  }
  // Iterate until every letter image has length >= n; then every n-factor
  // sits inside the image of some 2-letter factor.
  std::array<std::string, 2> images{"0", "1"};
  while (std::min(images[0].size(), images[1].size()) < n) {
    images[0] = apply_substitution(s, images[0]);
    images[1] = apply_substitution(s, images[1]);
  }
  WindowSet set(n);
  for (const auto& pair : pairs) {
    const std::string img = images[pair[0] == '1' ? 1 : 0] + images[pair[1] == '1' ? 1 : 0];
    set.add_stream(string_to_word(img));
  }
  return set.size();
}

BlockCount block_complexity(const ProcessGenerator& g, const Orbit& orbit, std::size_t n) {
  if (n == 0) throw PreconditionError("block_complexity: n must be positive");
  const std::size_t len = orbit.symbols.size();
  if (len < 4 * n) {
    throw PreconditionError("block_complexity: sample length must be at least 4n");
  }
  BlockCount result;
  result.count = count_distinct_windows(orbit.symbols, n);
  result.exactness = std::visit(
      [&](const auto& k) -> Exactness {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Periodic>) {
          return len >= n + pattern_period(k.pattern) - 1 ? Exactness::exact
                                                          : Exactness::lower_bound;
        } else if constexpr (std::is_same_v<T, SturmianRotation>) {
          return is_quadratic_label(k.alpha.label) && len >= n * sturmian_sync_factor
                     ? Exactness::exact
                     : Exactness::lower_bound;
        } else if constexpr (std::is_same_v<T, Substitution>) {
          return result.count == substitution_language_size(k, n) ? Exactness::exact
                                                                  : Exactness::lower_bound;
        } else {
          return Exactness::lower_bound;
        }
      },
      g.kind());
  return result;
}

BlockCount block_complexity(const ProcessGenerator& g, std::size_t n, std::size_t sample_len,
                            std::uint64_t seed) {
  if (n == 0) throw PreconditionError("block_complexity: n must be positive");
  if (sample_len < 4 * n) {
    throw PreconditionError("block_complexity: sample length must be at least 4n");
  }
  return block_complexity(g, sample_orbit(g, sample_len, seed), n);
}

WindowCode::WindowCode(std::size_t k0, std::vector<std::int8_t> table, std::string name)
    : k0_(k0), table_(std::move(table)), name_(std::move(name)) {}

WindowCode WindowCode::identity() { return center(0); }

WindowCode WindowCode::majority(std::size_t half_width) {
  if (half_width > 12) throw SizeError("WindowCode: half width must be at most 12");
  const std::size_t width = 2 * half_width + 1;
  std::vector<std::int8_t> table(std::size_t{1} << width);
  for (std::size_t key = 0; key < table.size(); ++key) {
    table[key] = static_cast<std::int8_t>(static_cast<std::size_t>(std::popcount(key)) > half_width);
  }
  return WindowCode(half_width, std::move(table), "majority(" + std::to_string(width) + ")");
}

WindowCode WindowCode::center(std::size_t half_width) {
  if (half_width > 12) throw SizeError("WindowCode: half width must be at most 12");
  const std::size_t width = 2 * half_width + 1;
  std::vector<std::int8_t> table(std::size_t{1} << width);
  for (std::size_t key = 0; key < table.size(); ++key) {
    table[key] = static_cast<std::int8_t>((key >> half_width) & 1U);
  }
  return WindowCode(half_width, std::move(table),
                    half_width == 0 ? "identity" : "center(" + std::to_string(width) + ")");
}

WindowCode WindowCode::from_table(std::size_t half_width, std::vector<std::int8_t> table) {
  if (half_width > 12) throw SizeError("WindowCode: half width must be at most 12");
  if (table.size() != (std::size_t{1} << (2 * half_width + 1))) {
    throw SizeError("WindowCode: table size must be 2^(2 k0 + 1)");
  }
  for (auto v : table) {
    if (v < -1 || v > 1) throw PreconditionError("WindowCode: entries must be 0, 1 or -1");
  }
  return WindowCode(half_width, std::move(table), "table(k0=" + std::to_string(half_width) + ")");
}

BinaryWord window_code_partition(const Orbit& orbit, const WindowCode& code) {
  const std::size_t width = code.window_length();
  const std::size_t len = orbit.symbols.size();
  if (len < width) {
    throw PreconditionError("window_code_partition: orbit shorter than the code window");
  }
  const std::size_t out_len = len - 2 * code.half_width();
  BinaryWord out = BinaryWord::zeros(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const std::uint64_t key = orbit.symbols.window(i, width);
    const std::int8_t v = code.table()[key];
    if (v < 0) {
      throw PreconditionError("window_code_partition: code has no entry for window " +
                              orbit.symbols.slice(i, width).to_string() + " at center " +
                              std::to_string(i + code.half_width()));
    }
    out.set(i, v == 1);
  }
  return out;
}

}  // namespace slowent
