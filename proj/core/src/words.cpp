#include "slowent/words.hpp"

#include <bit>
#include <cmath>

#include "slowent/error.hpp"

namespace slowent {
namespace {

std::size_t block_count(std::size_t n) { return (n + 63) / 64; }

}  // namespace

BinaryWord BinaryWord::zeros(std::size_t n) {
  if (n == 0) throw PreconditionError("BinaryWord: length must be at least 1");
  return BinaryWord(std::vector<std::uint64_t>(block_count(n), 0), n);
}

BinaryWord BinaryWord::from_string(std::string_view bits) {
  BinaryWord w = zeros(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const char c = bits[i];
    if (c == '1') {
      w.set(i, true);
    } else if (c != '0') {
      throw PreconditionError("BinaryWord: symbol '" + std::string(1, c) + "' at position " +
                              std::to_string(i) + " is not 0 or 1");
    }
  }
  return w;
}

BinaryWord BinaryWord::from_bits(std::span<const std::uint8_t> bits) {
  BinaryWord w = zeros(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw PreconditionError("BinaryWord: symbol is not 0 or 1");
    w.set(i, bits[i] != 0);
  }
  return w;
}

BinaryWord BinaryWord::from_blocks(std::vector<std::uint64_t> blocks, std::size_t n) {
  if (n == 0) throw PreconditionError("BinaryWord: length must be at least 1");
  if (blocks.size() < block_count(n)) throw SizeError("BinaryWord: too few blocks for length");
  blocks.resize(block_count(n));
  BinaryWord w(std::move(blocks), n);
  w.clear_tail();
  return w;
}

BinaryWord BinaryWord::from_uint(std::uint64_t value, std::size_t n) {
  if (n == 0 || n > 64) throw PreconditionError("BinaryWord::from_uint: n must be in [1, 64]");
  return from_blocks({value}, n);
}

bool BinaryWord::at(std::size_t i) const {
  if (i >= len_) throw PreconditionError("BinaryWord::at: index out of range");
  return (*this)[i];
}

void BinaryWord::clear_tail() noexcept {
  const std::size_t rem = len_ & 63;
  if (rem != 0) blocks_.back() &= (std::uint64_t{1} << rem) - 1;
}

std::uint64_t BinaryWord::window(std::size_t offset, std::size_t n) const noexcept {
  const std::size_t block = offset >> 6;
  const std::size_t shift = offset & 63;
  std::uint64_t v = blocks_[block] >> shift;
  if (shift != 0 && shift + n > 64) v |= blocks_[block + 1] << (64 - shift);
  return n == 64 ? v : v & ((std::uint64_t{1} << n) - 1);
}

void BinaryWord::copy_window(std::size_t offset, std::size_t n,
                             std::vector<std::uint64_t>& out) const {
  const std::size_t nb = block_count(n);
  out.resize(nb);
  const std::size_t block = offset >> 6;
  const std::size_t shift = offset & 63;
  if (shift == 0) {
    for (std::size_t i = 0; i < nb; ++i) out[i] = blocks_[block + i];
  } else {
    const std::size_t last = blocks_.size() - 1;
    for (std::size_t i = 0; i < nb; ++i) {
      std::uint64_t v = blocks_[block + i] >> shift;
      if (block + i < last) v |= blocks_[block + i + 1] << (64 - shift);
      out[i] = v;
    }
  }
  const std::size_t rem = n & 63;
  if (rem != 0) out.back() &= (std::uint64_t{1} << rem) - 1;
}

BinaryWord BinaryWord::slice(std::size_t offset, std::size_t n) const {
  std::vector<std::uint64_t> out;
  copy_window(offset, n, out);
  return BinaryWord(std::move(out), n);
}

BinaryWord BinaryWord::complement() const {
  BinaryWord w = *this;
  for (auto& b : w.blocks_) b = ~b;
  w.clear_tail();
  return w;
}

std::size_t BinaryWord::count_ones() const noexcept {
  std::size_t c = 0;
  for (auto b : blocks_) c += static_cast<std::size_t>(std::popcount(b));
  return c;
}

std::string BinaryWord::to_string() const {
  std::string s(len_, '0');
  for (std::size_t i = 0; i < len_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

std::size_t mismatch_count(const BinaryWord& a, const BinaryWord& b) noexcept {
  const auto x = a.blocks();
  const auto y = b.blocks();
  std::size_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += static_cast<std::size_t>(std::popcount(x[i] ^ y[i]));
  return d;
}

double dbar_words(const BinaryWord& a, const BinaryWord& b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("dbar_words: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
  }
  return static_cast<double>(mismatch_count(a, b)) / static_cast<double>(a.size());
}

long strict_radius_count(std::size_t n, double radius) {
  long d = -1;
  for (std::size_t j = 0; j <= n; ++j) {
    if (static_cast<double>(j) / static_cast<double>(n) < radius) {
      d = static_cast<long>(j);
    } else {
      break;
    }
  }
  return d;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary_entropy: p must lie in [0, 1]");
  auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
  return term(p) + term(1.0 - p);
}

LabeledPartition::LabeledPartition(std::vector<int> labels, std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (labels_.size() != weights_.size()) {
    throw LengthMismatch("LabeledPartition: labels and weights differ in length");
  }
  if (labels_.empty()) throw PreconditionError("LabeledPartition: no atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 1) throw PreconditionError("LabeledPartition: labels must be >= 1");
    if (!(weights_[i] >= 0.0)) throw PreconditionError("LabeledPartition: negative weight");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw PreconditionError("LabeledPartition: weights must sum to 1");
  }
}

double partition_distance(const LabeledPartition& q, const LabeledPartition& qhat) {
  if (q.size() != qhat.size()) throw LengthMismatch("partition_distance: atom counts differ");
  if (q.weights() != qhat.weights()) {
    throw PreconditionError("partition_distance: weight vectors differ");
  }
  // An atom labeled i in q and j != i in qhat lies in A_i xor B_i and in
  // A_j xor B_j, so it contributes its full weight after halving.
  double d = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (q.labels()[a] != qhat.labels()[a]) d += q.weights()[a];
  }
  return d;
}

BinaryWord extract_name(const BinaryWord& stream, std::size_t offset, std::size_t n) {
  if (n == 0 || offset > stream.size() || n > stream.size() - offset) {
    throw PreconditionError("extract_name: window [" + std::to_string(offset) + ", " +
                            std::to_string(offset + n) + ") outside stream of length " +
                            std::to_string(stream.size()));
  }
  return stream.slice(offset, n);
}

std::size_t BinaryWordHash::operator()(const BinaryWord& w) const noexcept {
  std::uint64_t h = w.size();
  for (auto b : w.blocks()) h = (h ^ b) * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL;
  return static_cast<std::size_t>(h ^ (h >> 29));
}

}  // namespace slowent
