#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <set>
#include <string>

#include "slowent/error.hpp"
#include "slowent/models.hpp"

using namespace slowent;

namespace {

using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;

// Rotation coding evaluated directly on the irrational at 256-bit precision.
std::string rotation_reference(const Big& alpha, std::size_t n) {
  std::string s(n, '0');
  Big x = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x >= 1 - alpha) s[i] = '1';
    x += alpha;
    if (x >= 1) x -= 1;
  }
  return s;
}

std::size_t distinct_windows(const std::string& s, std::size_t n) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i + n <= s.size(); ++i) seen.insert(s.substr(i, n));
  return seen.size();
}

}  // namespace

TEST_CASE("golden rotation number is a deep convergent") {
  const auto g = RotationNumber::golden();
  CHECK(g.denominator >= (std::uint64_t{1} << 40));
  CHECK(g.approx() == doctest::Approx(0.6180339887498949).epsilon(1e-15));
  CHECK(RotationNumber::parse("sqrt:2").approx() == doctest::Approx(0.41421356237309503));
  CHECK(RotationNumber::parse("silver").approx() == doctest::Approx(0.41421356237309503));
  CHECK_THROWS_AS(RotationNumber::from_decimal("0.5"), DomainError);
}

TEST_CASE("golden Sturmian orbit starts 010110") {
  const auto o = sample_orbit(ProcessGenerator::sturmian(RotationNumber::golden(), 0.0), 6, 1);
  CHECK(o.symbols.to_string() == "010110");
}

TEST_CASE("Sturmian orbit matches a 256-bit reference rotation") {
  const Big alpha = (boost::multiprecision::sqrt(Big(5)) - 1) / 2;
  const std::size_t n = 20000;
  const auto ref = rotation_reference(alpha, n);
  const auto o = sample_orbit(ProcessGenerator::sturmian(RotationNumber::golden(), 0.0), n, 1);
  CHECK(o.symbols.to_string() == ref);

  const Big silver = boost::multiprecision::sqrt(Big(2)) - 1;
  const auto s = sample_orbit(ProcessGenerator::sturmian(RotationNumber::silver(), 0.0), n, 1);
  CHECK(s.symbols.to_string() == rotation_reference(silver, n));
}

TEST_CASE("Sturmian complexity is n + 1 and certified") {
  const auto g = ProcessGenerator::sturmian(RotationNumber::golden(), 0.0);
  const auto orbit = sample_orbit(g, 40 * sturmian_sync_factor, 3);
  for (std::size_t n = 1; n <= 40; ++n) {
    const auto c = block_complexity(g, orbit, n);
    CHECK(c.count == n + 1);
    CHECK(c.exactness == Exactness::exact);
  }
  // too short to certify
  CHECK(block_complexity(g, 300, 4 * 300, 1).exactness == Exactness::lower_bound);
  CHECK_THROWS(block_complexity(g, 10, 8, 1));
}

TEST_CASE("periodic complexity") {
  const auto g = ProcessGenerator::periodic("011");
  CHECK(sample_orbit(g, 8, 1).symbols.to_string() == "01101101");
  CHECK(block_complexity(g, 1, 100, 1).count == 2);
  for (std::size_t n = 2; n <= 12; ++n) {
    const auto c = block_complexity(g, n, 100, 1);
    CHECK(c.count == 3);
    CHECK(c.exactness == Exactness::exact);
  }
}

TEST_CASE("substitution languages") {
  // Thue-Morse factor counts (a well-known integer sequence).
  const std::size_t thue_morse[] = {2, 4, 6, 10, 12, 16, 20, 22, 24, 28, 32, 36};
  const auto tm = ProcessGenerator::substitution("01", "10");
  const auto& rules = std::get<Substitution>(tm.kind());
  for (std::size_t n = 1; n <= 12; ++n) {
    CHECK(substitution_language_size(rules, n) == thue_morse[n - 1]);
    const auto c = block_complexity(tm, n, 64 * n + 2000, 1);
    CHECK(c.count == thue_morse[n - 1]);
    CHECK(c.exactness == Exactness::exact);
  }
  // Fibonacci substitution codes a golden rotation: n + 1 factors.
  const auto fib = ProcessGenerator::substitution("01", "0");
  const auto& fr = std::get<Substitution>(fib.kind());
  for (std::size_t n = 1; n <= 30; ++n) CHECK(substitution_language_size(fr, n) == n + 1);
  CHECK(sample_orbit(fib, 8, 1).symbols.to_string() == "01001010");
  CHECK_THROWS(ProcessGenerator::substitution("0", "1"));
}

TEST_CASE("Bernoulli samples are seeded and only lower bounds") {
  const auto g = ProcessGenerator::bernoulli(0.5);
  const auto a = sample_orbit(g, 5000, 9);
  CHECK(a.symbols == sample_orbit(g, 5000, 9).symbols);
  CHECK_FALSE(a.symbols == sample_orbit(g, 5000, 10).symbols);
  const double freq = double(a.symbols.count_ones()) / 5000.0;
  CHECK(std::abs(freq - 0.5) < 4 * 0.5 / std::sqrt(5000.0));
  const auto c = block_complexity(g, a, 4);
  CHECK(c.count == 16);
  CHECK(c.exactness == Exactness::lower_bound);
  CHECK(block_complexity(g, a, 12).count == distinct_windows(a.symbols.to_string(), 12));
  CHECK_FALSE(g.zero_entropy());
  CHECK(ProcessGenerator::periodic("01").zero_entropy());
  CHECK_THROWS(ProcessGenerator::bernoulli(1.5));
}

TEST_CASE("product zips two sub-orbits through the combiner") {
  const auto g = ProcessGenerator::product(ProcessGenerator::periodic("01"), ProcessGenerator::periodic("0011"),
                                           {0, 1, 1, 0});
  CHECK(sample_orbit(g, 8, 1).symbols.to_string() == "01100110");
  const auto and_g = ProcessGenerator::product(ProcessGenerator::periodic("01"),
                                               ProcessGenerator::periodic("0011"), {0, 0, 0, 1});
  CHECK(sample_orbit(and_g, 8, 1).symbols.to_string() == "00010001");
}

TEST_CASE("window codes") {
  const Orbit o{BinaryWord::from_string("0011010"), "test", 0};
  CHECK(window_code_partition(o, WindowCode::identity()).to_string() == "0011010");
  CHECK(window_code_partition(o, WindowCode::majority(1)).to_string() == "01110");
  CHECK(window_code_partition(o, WindowCode::center(1)).to_string() == "01101");
  // a table that lacks the window 111
  std::vector<std::int8_t> table(8, 0);
  table[7] = -1;
  const auto partial = WindowCode::from_table(1, table);
  CHECK(window_code_partition(o, partial).to_string() == "00000");
  const Orbit ones{BinaryWord::from_string("0111"), "test", 0};
  CHECK_THROWS_AS(window_code_partition(ones, partial), PreconditionError);
}
