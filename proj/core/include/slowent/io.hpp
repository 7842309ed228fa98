#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "slowent/words.hpp"

namespace slowent::io {

/// Packed sample format. A file is a sequence of records:
///
///   "SLW1" | bit length (uint64, little-endian) | ceil(len / 8) bytes
///
/// Symbol i is bit (i % 8) of byte i / 8. An orbit is one record; a set of
/// stacked names is one record per name.
void write_packed(std::ostream& out, std::span<const BinaryWord> words);
std::vector<BinaryWord> read_packed(std::istream& in);

/// One word per line as '0'/'1' characters.
void write_text(std::ostream& out, std::span<const BinaryWord> words);
std::vector<BinaryWord> read_text(std::istream& in);

void write_packed_file(const std::filesystem::path& path, std::span<const BinaryWord> words);
std::vector<BinaryWord> read_packed_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::span<const BinaryWord> words);
std::vector<BinaryWord> read_text_file(const std::filesystem::path& path);

}  // namespace slowent::io
