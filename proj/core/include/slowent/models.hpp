#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slowent/words.hpp"

namespace slowent {

/// Rotation number stored as a continued-fraction convergent p/q of the
/// intended real, with q >= 2^40. Orbits are computed in exact integer
/// arithmetic modulo q, so no floating-point drift accumulates.
struct RotationNumber {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  bool intended_irrational = true;
  std::string label;  // e.g. "golden", "sqrt:2", or the decimal text

  /// (sqrt(5) - 1) / 2.
  static RotationNumber golden();
  /// sqrt(2) - 1.
  static RotationNumber silver();
  /// Fractional part of sqrt(k) for a non-square k.
  static RotationNumber sqrt_fraction(unsigned k);
  /// A decimal string in (0, 1) evaluated at 256-bit precision. Throws
  /// DomainError if its expansion terminates before reaching q >= 2^40
  /// (i.e. the value is rational at that resolution).
  static RotationNumber from_decimal(const std::string& text);
  /// "golden", "silver", "sqrt:<k>" or a decimal string.
  static RotationNumber parse(const std::string& text);

  double approx() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

class ProcessGenerator;

struct Bernoulli {
  double p = 0.5;
};

struct SturmianRotation {
  RotationNumber alpha;
  /// Initial point on the circle; when unset, derived from the seed.
  std::optional<double> phase;
};

/// Binary substitution 0 -> rules[0], 1 -> rules[1].
struct Substitution {
  std::array<std::string, 2> rules;
};

struct Periodic {
  std::string pattern;
};

/// Zips two sub-orbits through a 2-bit table: symbol = combiner[2*left + right].
struct Product {
  std::shared_ptr<const ProcessGenerator> left;
  std::shared_ptr<const ProcessGenerator> right;
  std::array<std::uint8_t, 4> combiner{0, 1, 1, 0};
};

/// Deterministic, seeded source of binary orbit codings. Construct through
/// the static factories, which enforce each kind's invariants.
class ProcessGenerator {
 public:
  using Kind = std::variant<Bernoulli, SturmianRotation, Substitution, Periodic, Product>;

  static ProcessGenerator bernoulli(double p);
  static ProcessGenerator sturmian(RotationNumber alpha, std::optional<double> phase = 0.0);
  /// Rules must be nonempty 0/1 strings, primitive and length-growing.
  static ProcessGenerator substitution(std::string rule0, std::string rule1);
  static ProcessGenerator periodic(std::string pattern);
  static ProcessGenerator product(ProcessGenerator left, ProcessGenerator right,
                                  std::array<std::uint8_t, 4> combiner);

  const Kind& kind() const noexcept { return kind_; }
  std::string describe() const;
  /// True for the kinds with zero topological entropy (all but Bernoulli
  /// and products containing one).
  bool zero_entropy() const;

 private:
  explicit ProcessGenerator(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// A finite orbit coding x, Tx, T^2x, ... plus its provenance.
struct Orbit {
  BinaryWord symbols;
  std::string generator_id;
  std::uint64_t seed = 0;
};

/// Deterministic in (g, length, seed).
///  - Bernoulli: i.i.d. symbols from the seeded stream.
///  - Sturmian: symbol i is 1 iff {phase + i alpha} lies in [1 - alpha, 1).
///  - Periodic: tiles the pattern.
///  - Substitution: iterates from symbol 0 until long enough, then truncates.
///  - Product: zips sub-orbits generated with derive_seed(seed, 0 / 1).
Orbit sample_orbit(const ProcessGenerator& g, std::size_t length, std::uint64_t seed);

enum class Exactness { exact, lower_bound };

struct BlockCount {
  std::size_t count = 0;
  Exactness exactness = Exactness::lower_bound;
};

/// Minimum orbit length at which a Sturmian window count is declared exact.
constexpr std::size_t sturmian_sync_factor = std::size_t{1} << 16;

/// Distinct length-n windows of a sample orbit of length sample_len.
/// Exactness per kind:
///  - Periodic: exact once sample_len >= n + period - 1.
///  - Sturmian: exact once sample_len >= n * 2^16 (every cylinder of the
///    rotation partition has length bounded below in terms of n for the
///    quadratic irrationals used here; see docs/complexity.md).
///  - Substitution: exact when the sampled set equals the language's
///    n-factors, computed independently from the 2-letter factor closure.
///  - Bernoulli and Product: lower_bound (the sample cannot certify).
/// Requires sample_len >= 4 n.
BlockCount block_complexity(const ProcessGenerator& g, std::size_t n, std::size_t sample_len,
                            std::uint64_t seed);

/// Same, reusing an orbit already sampled from `g`.
BlockCount block_complexity(const ProcessGenerator& g, const Orbit& orbit, std::size_t n);

/// Number of n-factors of a primitive substitution's language.
std::size_t substitution_language_size(const Substitution& s, std::size_t n);

/// A lookup table from (2 k0 + 1)-symbol windows to {0, 1}. The window
/// w_0 ... w_{2k0} is indexed by sum_j w_j 2^j.
class WindowCode {
 public:
  static WindowCode identity();
  static WindowCode majority(std::size_t half_width);
  static WindowCode center(std::size_t half_width);
  /// Explicit table; entries are 0, 1 or -1 (missing).
  static WindowCode from_table(std::size_t half_width, std::vector<std::int8_t> table);

  std::size_t half_width() const noexcept { return k0_; }
  std::size_t window_length() const noexcept { return 2 * k0_ + 1; }
  const std::vector<std::int8_t>& table() const noexcept { return table_; }
  std::string describe() const { return name_; }

 private:
  WindowCode(std::size_t k0, std::vector<std::int8_t> table, std::string name);
  std::size_t k0_;
  std::vector<std::int8_t> table_;
  std::string name_;
};

/// Applies `code` at each center i in [k0, len - k0); output length len - 2 k0.
/// Throws PreconditionError naming the first window the table lacks.
BinaryWord window_code_partition(const Orbit& orbit, const WindowCode& code);

}  // namespace slowent
