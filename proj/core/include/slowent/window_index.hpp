#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "slowent/words.hpp"

namespace slowent {

/// Exact set of distinct length-n windows seen across one or more streams.
/// Windows up to 64 symbols are keyed directly; longer windows are hashed
/// and every hash hit is verified symbol by symbol, so counts never suffer
/// from collisions.
class WindowSet {
 public:
  explicit WindowSet(std::size_t n);

  std::size_t window_length() const noexcept { return n_; }
  std::size_t size() const noexcept { return count_; }

  /// Inserts every window of `stream`; returns, when `ids` is non-null, the
  /// id of each window position (ids are dense, in first-seen order).
  void add_stream(const BinaryWord& stream, std::vector<std::uint32_t>* ids = nullptr);

  /// Id of `w` (length n) or -1 if absent.
  long find(const BinaryWord& w) const;

 private:
  std::uint32_t insert_short(std::uint64_t key);
  std::uint32_t insert_long(const std::vector<std::uint64_t>& blocks);
  long lookup_long(const std::vector<std::uint64_t>& blocks) const;

  std::size_t n_;
  std::size_t blocks_per_window_;
  std::size_t count_ = 0;
  std::unordered_map<std::uint64_t, std::uint32_t> short_;
  // hash -> ids sharing that hash; window contents in pool_.
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> long_;
  std::vector<std::uint64_t> pool_;
};

/// Number of distinct length-n windows of `stream` (0 if n > stream length).
std::size_t count_distinct_windows(const BinaryWord& stream, std::size_t n);

/// Dense id per window position [0, stream.size() - n], ids in first-seen order.
std::vector<std::uint32_t> window_ids(const BinaryWord& stream, std::size_t n,
                                      std::size_t* distinct = nullptr);

}  // namespace slowent
