#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slowent {

/// A finite 0/1 name. Symbols are packed 64 to a block, symbol i living in
/// bit (i % 64) of block i / 64; bits past the end of the last block are
/// always zero. Semantics depend only on the symbol sequence.
class BinaryWord {
 public:
  /// n zero symbols; n >= 1.
  static BinaryWord zeros(std::size_t n);
  /// Parses a string of '0'/'1' characters; rejects anything else and "".
  static BinaryWord from_string(std::string_view bits);
  /// One symbol per element, each 0 or 1.
  static BinaryWord from_bits(std::span<const std::uint8_t> bits);
  /// Adopts packed blocks; stray bits past n are cleared.
  static BinaryWord from_blocks(std::vector<std::uint64_t> blocks, std::size_t n);
  /// The n low bits of `value`, bit j becoming symbol j. 1 <= n <= 64.
  static BinaryWord from_uint(std::uint64_t value, std::size_t n);

  std::size_t size() const noexcept { return len_; }
  bool operator[](std::size_t i) const noexcept {
    return (blocks_[i >> 6] >> (i & 63)) & 1U;
  }
  bool at(std::size_t i) const;
  void set(std::size_t i, bool bit) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (bit) {
      blocks_[i >> 6] |= mask;
    } else {
      blocks_[i >> 6] &= ~mask;
    }
  }

  std::span<const std::uint64_t> blocks() const noexcept { return blocks_; }

  /// Symbols [offset, offset + n) packed LSB-first into an integer;
  /// n <= 64 and the window must lie inside the word (unchecked).
  std::uint64_t window(std::size_t offset, std::size_t n) const noexcept;

  /// Copies symbols [offset, offset + n) into `out` as packed blocks
  /// (out is resized to ceil(n / 64)). Unchecked.
  void copy_window(std::size_t offset, std::size_t n, std::vector<std::uint64_t>& out) const;

  BinaryWord slice(std::size_t offset, std::size_t n) const;
  BinaryWord complement() const;
  std::size_t count_ones() const noexcept;
  std::string to_string() const;

  friend bool operator==(const BinaryWord&, const BinaryWord&) = default;

 private:
  BinaryWord(std::vector<std::uint64_t> blocks, std::size_t len)
      : blocks_(std::move(blocks)), len_(len) {}
  void clear_tail() noexcept;

  std::vector<std::uint64_t> blocks_;
  std::size_t len_ = 0;
};

/// Number of positions where a and b differ; lengths must match (unchecked).
std::size_t mismatch_count(const BinaryWord& a, const BinaryWord& b) noexcept;

/// Normalized Hamming distance (1/n) #{i : a_i != b_i}.
/// Throws LengthMismatch when the lengths differ.
double dbar_words(const BinaryWord& a, const BinaryWord& b);

/// Largest mismatch count d in [0, n] with d / n < radius, or -1 if none.
/// Ball membership tests compare integer mismatch counts against this.
long strict_radius_count(std::size_t n, double radius);

/// -p log2 p - (1-p) log2 (1-p) with 0 log 0 = 0. Throws DomainError
/// outside [0, 1].
double binary_entropy(double p);

/// A labeled partition of a finite weighted set of atoms.
class LabeledPartition {
 public:
  /// Labels are class indices >= 1; weights are nonnegative and sum to 1
  /// within 1e-12.
  LabeledPartition(std::vector<int> labels, std::vector<double> weights);

  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::vector<int> labels_;
  std::vector<double> weights_;
};

/// d(Q, Q') = 1/2 sum_i mass(A_i xor B_i). Atoms must carry identical weights.
double partition_distance(const LabeledPartition& q, const LabeledPartition& qhat);

/// The name window stream[offset, offset + n). Throws PreconditionError if
/// the window falls outside the stream or n == 0.
BinaryWord extract_name(const BinaryWord& stream, std::size_t offset, std::size_t n);

struct BinaryWordHash {
  std::size_t operator()(const BinaryWord& w) const noexcept;
};

}  // namespace slowent
