#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "draco/asp/ast.hpp"
#include "draco/error.hpp"

namespace draco::asp {

using TermId = std::uint32_t;

namespace detail {

struct IdVectorHash {
  std::size_t operator()(const std::vector<TermId>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull ^ v.size();
    for (TermId x : v) {
      h ^= x;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

// Interning table for ground terms. A store may sit on top of a frozen
// parent; lookups consult the parent first and new terms go to the overlay,
// so one compiled program can serve many concurrent evaluations.
class TermStore {
 public:
  struct Entry {
    Term::Kind kind;
    std::int64_t number = 0;
    std::string text;
    std::vector<TermId> elems;
  };

  TermStore() = default;
  explicit TermStore(const TermStore* parent)
      : parent_{parent}, offset_{parent ? parent->size() : 0} {}

  TermStore(const TermStore&) = delete;
  TermStore& operator=(const TermStore&) = delete;
  TermStore(TermStore&&) = default;
  TermStore& operator=(TermStore&&) = default;

  TermId size() const { return offset_ + static_cast<TermId>(entries_.size()); }

  const Entry& get(TermId id) const {
    if (id < offset_) return parent_->get(id);
    return entries_[id - offset_];
  }

  std::optional<TermId> find_integer(std::int64_t n) const {
    if (parent_) {
      if (auto id = parent_->find_integer(n)) return id;
    }
    auto it = integers_.find(n);
    if (it == integers_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<TermId> find_symbol(const std::string& s) const {
    if (parent_) {
      if (auto id = parent_->find_symbol(s)) return id;
    }
    auto it = symbols_.find(s);
    if (it == symbols_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<TermId> find_string(const std::string& s) const {
    if (parent_) {
      if (auto id = parent_->find_string(s)) return id;
    }
    auto it = strings_.find(s);
    if (it == strings_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<TermId> find_tuple(const std::vector<TermId>& elems) const {
    if (parent_) {
      if (auto id = parent_->find_tuple(elems)) return id;
    }
    auto it = tuples_.find(elems);
    if (it == tuples_.end()) return std::nullopt;
    return it->second;
  }

  TermId integer(std::int64_t n) {
    if (auto id = find_integer(n)) return *id;
    TermId id = push(Entry{Term::Kind::integer, n, {}, {}});
    integers_.emplace(n, id);
    return id;
  }
  TermId symbol(const std::string& s) {
    if (auto id = find_symbol(s)) return *id;
    TermId id = push(Entry{Term::Kind::symbol, 0, s, {}});
    symbols_.emplace(s, id);
    return id;
  }
  TermId string(const std::string& s) {
    if (auto id = find_string(s)) return *id;
    TermId id = push(Entry{Term::Kind::string, 0, s, {}});
    strings_.emplace(s, id);
    return id;
  }
  TermId tuple(std::vector<TermId> elems) {
    if (auto id = find_tuple(elems)) return *id;
    TermId id = push(Entry{Term::Kind::tuple, 0, {}, elems});
    tuples_.emplace(std::move(elems), id);
    return id;
  }

  // Ground, pool-free terms only.
  TermId intern(const Term& t) {
    switch (t.kind) {
      case Term::Kind::integer: return integer(t.number);
      case Term::Kind::symbol: return symbol(t.text);
      case Term::Kind::string: return string(t.text);
      case Term::Kind::tuple: {
        std::vector<TermId> elems;
        elems.reserve(t.args.size());
        for (const auto& a : t.args) elems.push_back(intern(a));
        return tuple(std::move(elems));
      }
      default:
        throw EvalError("cannot intern non-ground term " + to_string(t));
    }
  }

  std::optional<TermId> find(const Term& t) const {
    switch (t.kind) {
      case Term::Kind::integer: return find_integer(t.number);
      case Term::Kind::symbol: return find_symbol(t.text);
      case Term::Kind::string: return find_string(t.text);
      case Term::Kind::tuple: {
        std::vector<TermId> elems;
        for (const auto& a : t.args) {
          auto id = find(a);
          if (!id) return std::nullopt;
          elems.push_back(*id);
        }
        return find_tuple(elems);
      }
      default:
        return std::nullopt;
    }
  }

  Term to_term(TermId id) const {
    const Entry& e = get(id);
    switch (e.kind) {
      case Term::Kind::integer: return Term::integer(e.number);
      case Term::Kind::symbol: return Term::symbol(e.text);
      case Term::Kind::string: return Term::string(e.text);
      case Term::Kind::tuple: {
        std::vector<Term> elems;
        elems.reserve(e.elems.size());
        for (TermId x : e.elems) elems.push_back(to_term(x));
        return Term::tuple(std::move(elems));
      }
      default: return Term::anonymous();
    }
  }

  // Same order as compare_terms().
  int compare(TermId a, TermId b) const {
    if (a == b) return 0;
    const Entry& x = get(a);
    const Entry& y = get(b);
    auto rank = [](Term::Kind k) {
      switch (k) {
        case Term::Kind::integer: return 0;
        case Term::Kind::symbol: return 1;
        case Term::Kind::string: return 2;
        default: return 3;
      }
    };
    if (x.kind != y.kind) return rank(x.kind) < rank(y.kind) ? -1 : 1;
    switch (x.kind) {
      case Term::Kind::integer: return x.number < y.number ? -1 : (x.number > y.number ? 1 : 0);
      case Term::Kind::tuple:
        if (x.elems.size() != y.elems.size()) return x.elems.size() < y.elems.size() ? -1 : 1;
        for (std::size_t i = 0; i < x.elems.size(); ++i) {
          if (int c = compare(x.elems[i], y.elems[i]); c != 0) return c;
        }
        return 0;
      default: {
        int c = x.text.compare(y.text);
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
      }
    }
  }

 private:
  TermId push(Entry e) {
    entries_.push_back(std::move(e));
    return size() - 1;
  }

  const TermStore* parent_ = nullptr;
  TermId offset_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<std::int64_t, TermId> integers_;
  std::unordered_map<std::string, TermId> symbols_;
  std::unordered_map<std::string, TermId> strings_;
  std::unordered_map<std::vector<TermId>, TermId, detail::IdVectorHash> tuples_;
};

}  // namespace draco::asp
