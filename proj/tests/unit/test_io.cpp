#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "gen.hpp"
#include "slowent/error.hpp"
#include "slowent/io.hpp"

using namespace slowent;

TEST_CASE("SLW1 byte layout") {
  const std::vector<BinaryWord> words{BinaryWord::from_string("1011000011")};
  std::ostringstream out;
  io::write_packed(out, words);
  const std::string bytes = out.str();
  REQUIRE(bytes.size() == 4 + 8 + 2);
  CHECK(bytes.substr(0, 4) == "SLW1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 10);
  for (int i = 5; i < 12; ++i) CHECK(bytes[i] == 0);
  CHECK(static_cast<unsigned char>(bytes[12]) == 0x0d);  // symbols 0..7 = 10110000
  CHECK(static_cast<unsigned char>(bytes[13]) == 0x03);
}

TEST_CASE("property: packed and text round trips") {
  gen::Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BinaryWord> words;
    const std::size_t count = 1 + gen::below(rng, 5);
    for (std::size_t i = 0; i < count; ++i) words.push_back(gen::word(rng, 1 + gen::below(rng, 300)));
    std::stringstream packed, text;
    io::write_packed(packed, words);
    io::write_text(text, words);
    CHECK(io::read_packed(packed) == words);
    CHECK(io::read_text(text) == words);
  }
}

TEST_CASE("files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "slowent_io_test";
  std::filesystem::create_directories(dir);
  gen::Rng rng(52);
  const std::vector<BinaryWord> words{gen::word(rng, 1000), gen::word(rng, 3)};
  io::write_packed_file(dir / "a.slw1", words);
  io::write_text_file(dir / "a.txt", words);
  CHECK(io::read_packed_file(dir / "a.slw1") == words);
  CHECK(io::read_text_file(dir / "a.txt") == words);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(io::read_packed_file(dir / "missing.slw1"), PreconditionError);
}

TEST_CASE("malformed records are rejected") {
  std::stringstream bad_magic("SLW2\x01\0\0\0\0\0\0\0\x01");
  CHECK_THROWS_AS(io::read_packed(bad_magic), PreconditionError);

  std::ostringstream out;
  io::write_packed(out, std::vector<BinaryWord>{BinaryWord::from_string("101")});
  std::string bytes = out.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(io::read_packed(truncated), PreconditionError);
  bytes.back() = static_cast<char>(0xff);  // padding bits set
  std::stringstream padded(bytes);
  CHECK_THROWS_AS(io::read_packed(padded), PreconditionError);
}
