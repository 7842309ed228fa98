#include "slowent/io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "slowent/error.hpp"

namespace slowent::io {
namespace {

constexpr std::array<char, 4> kMagic{'S', 'L', 'W', '1'};

}  // namespace

void write_packed(std::ostream& out, std::span<const BinaryWord> words) {
  for (const auto& w : words) {
    out.write(kMagic.data(), kMagic.size());
    std::array<char, 8> len{};
    const std::uint64_t n = w.size();
    for (int i = 0; i < 8; ++i) len[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
    out.write(len.data(), len.size());
    const std::size_t bytes = (w.size() + 7) / 8;
    std::string buf(bytes, '\0');
    const auto blocks = w.blocks();
    for (std::size_t b = 0; b < bytes; ++b) {
      buf[b] = static_cast<char>((blocks[b / 8] >> (8 * (b % 8))) & 0xFF);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw Error("write_packed: stream failure");
}

std::vector<BinaryWord> read_packed(std::istream& in) {
  std::vector<BinaryWord> words;
  for (;;) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() == 0) break;
    if (in.gcount() != 4 || magic != kMagic) throw PreconditionError("read_packed: bad magic");
    std::array<unsigned char, 8> len{};
    in.read(reinterpret_cast<char*>(len.data()), len.size());
    if (in.gcount() != 8) throw PreconditionError("read_packed: truncated length");
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(len[i]) << (8 * i);
    if (n == 0) throw PreconditionError("read_packed: zero-length record");
    const std::size_t bytes = (n + 7) / 8;
    std::string buf(bytes, '\0');
    in.read(buf.data(), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
      throw PreconditionError("read_packed: truncated payload");
    }
    std::vector<std::uint64_t> blocks((n + 63) / 64, 0);
    for (std::size_t b = 0; b < bytes; ++b) {
      blocks[b / 8] |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[b])) << (8 * (b % 8));
    }
    BinaryWord w = BinaryWord::from_blocks(std::move(blocks), n);
    // Padding bits must be zero for a bit-exact round trip.
    if (n % 8 != 0 && (static_cast<unsigned char>(buf.back()) >> (n % 8)) != 0) {
      throw PreconditionError("read_packed: nonzero padding bits");
    }
    words.push_back(std::move(w));
  }
  return words;
}

void write_text(std::ostream& out, std::span<const BinaryWord> words) {
  for (const auto& w : words) out << w.to_string() << '\n';
  if (!out) throw Error("write_text: stream failure");
}

std::vector<BinaryWord> read_text(std::istream& in) {
  std::vector<BinaryWord> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    words.push_back(BinaryWord::from_string(line));
  }
  return words;
}

void write_packed_file(const std::filesystem::path& path, std::span<const BinaryWord> words) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_packed(out, words);
}

std::vector<BinaryWord> read_packed_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  return read_packed(in);
}

void write_text_file(const std::filesystem::path& path, std::span<const BinaryWord> words) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_text(out, words);
}

std::vector<BinaryWord> read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  return read_text(in);
}

}  // namespace slowent::io
