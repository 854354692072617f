#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "draco/asp/terms.hpp"

namespace draco::asp {

// A set of ground tuples of fixed arity, stored row-major, with lazily built
// per-column hash indexes.
class Relation {
 public:
  explicit Relation(std::size_t arity = 0) : arity_{arity} {}

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  std::span<const TermId> row(std::size_t i) const { return {data_.data() + i * arity_, arity_}; }

  bool contains(std::span<const TermId> r) const {
    if (arity_ == 0) return count_ > 0;
    if (slots_.empty()) return false;
    std::size_t mask = slots_.size() - 1;
    for (std::size_t s = hash(r.data()) & mask;; s = (s + 1) & mask) {
      std::uint32_t v = slots_[s];
      if (v == 0) return false;
      if (equal(v - 1, r.data())) return true;
    }
  }

  // Returns true when the row was not present before.
  bool insert(std::span<const TermId> r) {
    if (arity_ == 0) {
      if (count_ > 0) return false;
      count_ = 1;
      return true;
    }
    if ((count_ + 1) * 2 > slots_.size()) rehash(slots_.empty() ? 16 : slots_.size() * 2);
    std::size_t mask = slots_.size() - 1;
    std::size_t s = hash(r.data()) & mask;
    for (;; s = (s + 1) & mask) {
      std::uint32_t v = slots_[s];
      if (v == 0) break;
      if (equal(v - 1, r.data())) return false;
    }
    std::uint32_t row_index = static_cast<std::uint32_t>(count_);
    data_.insert(data_.end(), r.begin(), r.end());
    ++count_;
    slots_[s] = row_index + 1;
    for (std::size_t c = 0; c < indexes_.size(); ++c) {
      if (indexes_[c]) indexes_[c]->add(r[c], row_index);
    }
    return true;
  }

  // Calls f(row_index) for rows whose column `col` equals `key`, newest first;
  // f returns false to stop. Builds the column index on first use.
  template <typename F>
  bool for_each_row(std::size_t col, TermId key, F&& f) const {
    const ColumnIndex& idx = index(col);
    for (std::uint32_t r = idx.head(key); r != 0; r = idx.next[r - 1]) {
      if (!f(r - 1)) return false;
    }
    return true;
  }

  std::size_t count(std::size_t col, TermId key) const {
    const ColumnIndex& idx = index(col);
    std::size_t n = 0;
    for (std::uint32_t r = idx.head(key); r != 0; r = idx.next[r - 1]) ++n;
    return n;
  }

 private:
  // Per-column chains: an open-addressed table maps a key to its newest row,
  // and next[] links each row to the previous one with the same key.
  // Row numbers are stored plus one so that zero means none.
  struct ColumnIndex {
    std::vector<TermId> keys;
    std::vector<std::uint32_t> heads;
    std::vector<std::uint32_t> next;
    std::size_t used = 0;

    static std::size_t slot_of(TermId k, std::size_t mask) {
      std::uint64_t h = static_cast<std::uint64_t>(k) * 0x9e3779b97f4a7c15ull;
      return static_cast<std::size_t>(h >> 32) & mask;
    }

    std::uint32_t head(TermId k) const {
      if (heads.empty()) return 0;
      std::size_t mask = heads.size() - 1;
      for (std::size_t s = slot_of(k, mask);; s = (s + 1) & mask) {
        if (heads[s] == 0) return 0;
        if (keys[s] == k) return heads[s];
      }
    }

    void grow() {
      std::vector<TermId> old_keys = std::move(keys);
      std::vector<std::uint32_t> old_heads = std::move(heads);
      std::size_t cap = old_heads.empty() ? 16 : old_heads.size() * 2;
      keys.assign(cap, 0);
      heads.assign(cap, 0);
      for (std::size_t i = 0; i < old_heads.size(); ++i) {
        if (old_heads[i] == 0) continue;
        std::size_t s = slot_of(old_keys[i], cap - 1);
        while (heads[s] != 0) s = (s + 1) & (cap - 1);
        keys[s] = old_keys[i];
        heads[s] = old_heads[i];
      }
    }

    void add(TermId k, std::uint32_t row) {
      if ((used + 1) * 2 > heads.size()) grow();
      std::size_t mask = heads.size() - 1;
      std::size_t s = slot_of(k, mask);
      while (heads[s] != 0 && keys[s] != k) s = (s + 1) & mask;
      if (heads[s] == 0) {
        ++used;
        keys[s] = k;
      }
      next.push_back(heads[s]);
      heads[s] = row + 1;
    }
  };

  const ColumnIndex& index(std::size_t col) const {
    if (indexes_.size() <= col) indexes_.resize(arity_);
    auto& idx = indexes_[col];
    if (!idx) {
      idx = std::make_unique<ColumnIndex>();
      idx->next.reserve(count_);
      for (std::size_t i = 0; i < count_; ++i) idx->add(data_[i * arity_ + col], static_cast<std::uint32_t>(i));
    }
    return *idx;
  }

  std::size_t hash(const TermId* r) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::size_t i = 0; i < arity_; ++i) {
      h ^= r[i] + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }

  bool equal(std::size_t row_index, const TermId* r) const {
    const TermId* a = data_.data() + row_index * arity_;
    for (std::size_t i = 0; i < arity_; ++i) {
      if (a[i] != r[i]) return false;
    }
    return true;
  }

  void rehash(std::size_t capacity) {
    slots_.assign(capacity, 0);
    std::size_t mask = capacity - 1;
    for (std::size_t i = 0; i < count_; ++i) {
      std::size_t s = hash(data_.data() + i * arity_) & mask;
      while (slots_[s] != 0) s = (s + 1) & mask;
      slots_[s] = static_cast<std::uint32_t>(i + 1);
    }
  }

  std::size_t arity_;
  std::size_t count_ = 0;
  std::vector<TermId> data_;
  std::vector<std::uint32_t> slots_;
  mutable std::vector<std::unique_ptr<ColumnIndex>> indexes_;
};

}  // namespace draco::asp
