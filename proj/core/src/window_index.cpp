#include "slowent/window_index.hpp"

#include <algorithm>

#include "slowent/error.hpp"

namespace slowent {
namespace {

std::uint64_t hash_blocks(const std::vector<std::uint64_t>& blocks) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (auto b : blocks) {
    h ^= b;
    h *= 0x9e3779b97f4a7c15ULL;
    h ^= h >> 32;
  }
  return h;
}

}  // namespace

WindowSet::WindowSet(std::size_t n) : n_(n), blocks_per_window_((n + 63) / 64) {
  if (n == 0) throw PreconditionError("WindowSet: window length must be positive");
}

std::uint32_t WindowSet::insert_short(std::uint64_t key) {
  auto [it, inserted] = short_.try_emplace(key, static_cast<std::uint32_t>(count_));
  if (inserted) ++count_;
  return it->second;
}

long WindowSet::lookup_long(const std::vector<std::uint64_t>& blocks) const {
  auto it = long_.find(hash_blocks(blocks));
  if (it == long_.end()) return -1;
  for (auto id : it->second) {
    const auto* stored = pool_.data() + static_cast<std::size_t>(id) * blocks_per_window_;
    if (std::equal(blocks.begin(), blocks.end(), stored)) return id;
  }
  return -1;
}

std::uint32_t WindowSet::insert_long(const std::vector<std::uint64_t>& blocks) {
  auto& bucket = long_[hash_blocks(blocks)];
  for (auto id : bucket) {
    const auto* stored = pool_.data() + static_cast<std::size_t>(id) * blocks_per_window_;
    if (std::equal(blocks.begin(), blocks.end(), stored)) return id;
  }
  const auto id = static_cast<std::uint32_t>(count_++);
  bucket.push_back(id);
  pool_.insert(pool_.end(), blocks.begin(), blocks.end());
  return id;
}

void WindowSet::add_stream(const BinaryWord& stream, std::vector<std::uint32_t>* ids) {
  if (ids) ids->clear();
  if (stream.size() < n_) return;
  const std::size_t positions = stream.size() - n_ + 1;
  if (ids) ids->reserve(positions);
  if (n_ <= 64) {
    for (std::size_t s = 0; s < positions; ++s) {
      const auto id = insert_short(stream.window(s, n_));
      if (ids) ids->push_back(id);
    }
    return;
  }
  std::vector<std::uint64_t> buf;
  for (std::size_t s = 0; s < positions; ++s) {
    stream.copy_window(s, n_, buf);
    const auto id = insert_long(buf);
    if (ids) ids->push_back(id);
  }
}

long WindowSet::find(const BinaryWord& w) const {
  if (w.size() != n_) throw LengthMismatch("WindowSet::find: word length differs");
  if (n_ <= 64) {
    auto it = short_.find(w.window(0, n_));
    return it == short_.end() ? -1 : static_cast<long>(it->second);
  }
  std::vector<std::uint64_t> buf(w.blocks().begin(), w.blocks().end());
  return lookup_long(buf);
}

std::size_t count_distinct_windows(const BinaryWord& stream, std::size_t n) {
  WindowSet set(n);
  set.add_stream(stream);
  return set.size();
}

std::vector<std::uint32_t> window_ids(const BinaryWord& stream, std::size_t n,
                                      std::size_t* distinct) {
  WindowSet set(n);
  std::vector<std::uint32_t> ids;
  set.add_stream(stream, &ids);
  if (distinct) *distinct = set.size();
  return ids;
}

}  // namespace slowent
