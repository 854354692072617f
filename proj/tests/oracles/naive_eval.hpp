#pragma once

// Reference evaluator used only by tests: nested-loop joins over a std::set,
// no indexes, no body reordering, no interning. Slow and obviously correct.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "draco/asp/ast.hpp"

namespace oracle {

using draco::asp::Atom;
using draco::asp::BodyLiteral;
using draco::asp::Program;
using draco::asp::Rule;
using draco::asp::Term;

using Subst = std::map<std::string, Term>;
using Db = std::set<Atom>;

inline std::vector<Term> expand(const Term& t) {
  if (t.kind == Term::Kind::pool) {
    std::vector<Term> out;
    for (const auto& a : t.args) {
      auto sub = expand(a);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  if (t.kind == Term::Kind::tuple) {
    std::vector<std::vector<Term>> acc{{}};
    for (const auto& e : t.args) {
      std::vector<std::vector<Term>> next;
      for (const auto& prefix : acc) {
        for (const auto& x : expand(e)) {
          auto p = prefix;
          p.push_back(x);
          next.push_back(p);
        }
      }
      acc = next;
    }
    std::vector<Term> out;
    for (auto& a : acc) out.push_back(Term::tuple(a));
    return out;
  }
  return {t};
}

inline std::vector<Atom> expand(const Atom& a) {
  std::vector<Atom> acc{Atom{a.predicate, {}}};
  for (const auto& arg : a.args) {
    std::vector<Atom> next;
    for (const auto& prefix : acc) {
      for (const auto& x : expand(arg)) {
        auto p = prefix;
        p.args.push_back(x);
        next.push_back(p);
      }
    }
    acc = next;
  }
  return acc;
}

inline bool unify(const Term& pattern, const Term& value, Subst& s) {
  switch (pattern.kind) {
    case Term::Kind::anonymous: return true;
    case Term::Kind::variable: {
      auto it = s.find(pattern.text);
      if (it != s.end()) return it->second == value;
      s[pattern.text] = value;
      return true;
    }
    case Term::Kind::tuple:
      if (value.kind != Term::Kind::tuple || value.args.size() != pattern.args.size()) return false;
      for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        if (!unify(pattern.args[i], value.args[i], s)) return false;
      }
      return true;
    default: return pattern == value;
  }
}

inline bool unify(const Atom& pattern, const Atom& value, Subst& s) {
  if (pattern.predicate != value.predicate || pattern.args.size() != value.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    if (!unify(pattern.args[i], value.args[i], s)) return false;
  }
  return true;
}

inline Term apply(const Term& t, const Subst& s) {
  if (t.kind == Term::Kind::variable) {
    auto it = s.find(t.text);
    return it == s.end() ? t : it->second;
  }
  if (t.kind == Term::Kind::tuple) {
    std::vector<Term> e;
    for (const auto& a : t.args) e.push_back(apply(a, s));
    return Term::tuple(e);
  }
  return t;
}

inline Atom apply(const Atom& a, const Subst& s) {
  Atom out{a.predicate, {}};
  for (const auto& t : a.args) out.args.push_back(apply(t, s));
  return out;
}

inline std::size_t count(const Atom& pattern, const Db& db, const Subst& s) {
  Atom p = apply(pattern, s);
  std::size_t n = 0;
  for (const auto& a : db) {
    Subst local = s;
    if (unify(p, a, local)) ++n;
  }
  return n;
}

// Enumerate substitutions satisfying the body, literals in written order but
// positives first.
template <typename F>
void solve_body(const std::vector<BodyLiteral>& body, const Db& db, F&& f) {
  std::vector<const BodyLiteral*> pos, rest;
  for (const auto& l : body) (l.kind == BodyLiteral::Kind::positive ? pos : rest).push_back(&l);

  std::vector<Subst> frontier{Subst{}};
  for (const auto* lit : pos) {
    std::vector<Subst> next;
    for (const auto& s : frontier) {
      for (const auto& a : db) {
        Subst t = s;
        if (unify(lit->atom, a, t)) next.push_back(t);
      }
    }
    frontier = next;
  }
  for (const auto& s : frontier) {
    bool ok = true;
    for (const auto* lit : rest) {
      if (lit->kind == BodyLiteral::Kind::negated) {
        ok = count(lit->atom, db, s) == 0;
      } else if (lit->kind == BodyLiteral::Kind::comparison) {
        int c = draco::asp::compare_terms(apply(lit->comparison.lhs, s), apply(lit->comparison.rhs, s));
        ok = draco::asp::apply_op(lit->comparison.op, c, 0);
      } else {
        auto n = static_cast<std::int64_t>(count(lit->cardinality.pattern, db, s));
        ok = draco::asp::apply_op(lit->cardinality.op, n, lit->cardinality.bound);
      }
      if (!ok) break;
    }
    if (ok) f(s);
  }
}

struct Result {
  Db atoms;
  bool inconsistent = false;
};

inline Result evaluate(const Program& program, const std::vector<Atom>& base) {
  std::vector<const Rule*> rules;
  for (const auto& b : program.blocks) {
    for (const auto& r : b.rules) rules.push_back(&r);
  }

  // Levels by relaxation.
  std::map<std::pair<std::string, std::size_t>, int> level;
  auto key = [](const Atom& a) { return std::make_pair(a.predicate, a.args.size()); };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto* r : rules) {
      const Atom* h = r->head_atom();
      if (!h) continue;
      int& lh = level[key(*h)];
      for (const auto& l : r->body) {
        int need = 0;
        if (l.kind == BodyLiteral::Kind::positive) need = level[key(l.atom)];
        else if (l.kind == BodyLiteral::Kind::negated) need = level[key(l.atom)] + 1;
        else if (l.kind == BodyLiteral::Kind::cardinality) need = level[key(l.cardinality.pattern)] + 1;
        else continue;
        if (need > lh) {
          lh = need;
          changed = true;
        }
      }
    }
  }
  int top = 0;
  for (auto& [k, v] : level) top = std::max(top, v);

  Result out;
  for (const auto& a : base) out.atoms.insert(a);
  for (const auto* r : rules) {
    if (r->is_fact()) {
      for (const auto& a : expand(*r->head_atom())) out.atoms.insert(a);
    }
  }
  for (int L = 0; L <= top; ++L) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto* r : rules) {
        const Atom* h = r->head_atom();
        if (!h || r->body.empty() || level[key(*h)] != L) continue;
        std::vector<Atom> derived;
        solve_body(r->body, out.atoms, [&](const Subst& s) { derived.push_back(apply(*h, s)); });
        for (auto& a : derived) changed = out.atoms.insert(a).second || changed;
      }
    }
  }
  for (const auto* r : rules) {
    if (!r->is_constraint()) continue;
    solve_body(r->body, out.atoms, [&](const Subst&) { out.inconsistent = true; });
  }
  return out;
}

}  // namespace oracle
