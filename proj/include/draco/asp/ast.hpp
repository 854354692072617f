#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace draco::asp {

// Term of the rule language. Pools may only appear in fact arguments and are
// expanded before evaluation.
struct Term {
  enum class Kind { integer, symbol, string, tuple, variable, anonymous, pool };

  Kind kind = Kind::symbol;
  std::int64_t number = 0;
  std::string text;        // symbol name, string contents, or variable name
  std::vector<Term> args;  // tuple elements or pool alternatives

  static Term integer(std::int64_t n) {
    Term t;
    t.kind = Kind::integer;
    t.number = n;
    return t;
  }
  static Term symbol(std::string name) {
    Term t;
    t.kind = Kind::symbol;
    t.text = std::move(name);
    return t;
  }
  static Term string(std::string value) {
    Term t;
    t.kind = Kind::string;
    t.text = std::move(value);
    return t;
  }
  static Term variable(std::string name) {
    Term t;
    t.kind = Kind::variable;
    t.text = std::move(name);
    return t;
  }
  static Term anonymous() {
    Term t;
    t.kind = Kind::anonymous;
    return t;
  }
  static Term tuple(std::vector<Term> elems) {
    Term t;
    t.kind = Kind::tuple;
    t.args = std::move(elems);
    return t;
  }
  static Term pool(std::vector<Term> alternatives) {
    Term t;
    t.kind = Kind::pool;
    t.args = std::move(alternatives);
    return t;
  }

  bool is_ground() const {
    switch (kind) {
      case Kind::variable:
      case Kind::anonymous:
        return false;
      case Kind::tuple:
      case Kind::pool:
        for (const auto& a : args) {
          if (!a.is_ground()) return false;
        }
        return true;
      default:
        return true;
    }
  }

  bool has_pool() const {
    if (kind == Kind::pool) return true;
    for (const auto& a : args) {
      if (a.has_pool()) return true;
    }
    return false;
  }

  friend bool operator==(const Term&, const Term&) = default;
};

// Total order on ground terms: integers < symbols < strings < tuples;
// tuples compare by arity, then element-wise.
inline int compare_terms(const Term& a, const Term& b) {
  auto rank = [](Term::Kind k) {
    switch (k) {
      case Term::Kind::integer: return 0;
      case Term::Kind::symbol: return 1;
      case Term::Kind::string: return 2;
      case Term::Kind::tuple: return 3;
      case Term::Kind::pool: return 4;
      case Term::Kind::variable: return 5;
      case Term::Kind::anonymous: return 6;
    }
    return 7;
  };
  if (a.kind != b.kind) return rank(a.kind) < rank(b.kind) ? -1 : 1;
  switch (a.kind) {
    case Term::Kind::integer:
      return a.number < b.number ? -1 : (a.number > b.number ? 1 : 0);
    case Term::Kind::anonymous:
      return 0;
    case Term::Kind::tuple:
    case Term::Kind::pool:
      if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (int c = compare_terms(a.args[i], b.args[i]); c != 0) return c;
      }
      return 0;
    default:
      return a.text.compare(b.text) < 0 ? -1 : (a.text == b.text ? 0 : 1);
  }
}

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const {
    for (const auto& a : args) {
      if (!a.is_ground()) return false;
    }
    return true;
  }

  friend bool operator==(const Atom&, const Atom&) = default;
};

inline bool operator<(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate) return a.predicate < b.predicate;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size();
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (int c = compare_terms(a.args[i], b.args[i]); c != 0) return c < 0;
  }
  return false;
}

enum class CompareOp { eq, ne, lt, le, gt, ge };

inline std::string_view op_text(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

template <typename T>
bool apply_op(CompareOp op, const T& lhs, const T& rhs) {
  switch (op) {
    case CompareOp::eq: return lhs == rhs;
    case CompareOp::ne: return lhs != rhs;
    case CompareOp::lt: return lhs < rhs;
    case CompareOp::le: return lhs <= rhs;
    case CompareOp::gt: return lhs > rhs;
    case CompareOp::ge: return lhs >= rhs;
  }
  return false;
}

struct Comparison {
  CompareOp op = CompareOp::eq;
  Term lhs;
  Term rhs;
  friend bool operator==(const Comparison&, const Comparison&) = default;
};

// `{ pattern } op bound`: the number of distinct true ground instances of
// `pattern` compared against `bound`.
struct CardinalityTest {
  Atom pattern;
  CompareOp op = CompareOp::le;
  std::int64_t bound = 0;
  friend bool operator==(const CardinalityTest&, const CardinalityTest&) = default;
};

struct BodyLiteral {
  enum class Kind { positive, negated, comparison, cardinality };

  Kind kind = Kind::positive;
  Atom atom;                  // positive / negated
  Comparison comparison;      // comparison
  CardinalityTest cardinality;  // cardinality

  static BodyLiteral positive(Atom a) {
    BodyLiteral l;
    l.kind = Kind::positive;
    l.atom = std::move(a);
    return l;
  }
  static BodyLiteral negated(Atom a) {
    BodyLiteral l;
    l.kind = Kind::negated;
    l.atom = std::move(a);
    return l;
  }
  static BodyLiteral compare(Comparison c) {
    BodyLiteral l;
    l.kind = Kind::comparison;
    l.comparison = std::move(c);
    return l;
  }
  static BodyLiteral count(CardinalityTest c) {
    BodyLiteral l;
    l.kind = Kind::cardinality;
    l.cardinality = std::move(c);
    return l;
  }

  friend bool operator==(const BodyLiteral&, const BodyLiteral&) = default;
};

// `{ element : condition } = bound`
struct ChoiceHead {
  Atom element;
  Atom condition;
  std::int64_t bound = 1;
  friend bool operator==(const ChoiceHead&, const ChoiceHead&) = default;
};

struct Rule {
  std::variant<std::monostate, Atom, ChoiceHead> head;
  std::vector<BodyLiteral> body;

  bool is_constraint() const { return std::holds_alternative<std::monostate>(head); }
  bool is_choice() const { return std::holds_alternative<ChoiceHead>(head); }
  bool is_fact() const { return std::holds_alternative<Atom>(head) && body.empty(); }
  const Atom* head_atom() const { return std::get_if<Atom>(&head); }

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Block {
  std::string name;
  std::string description;
  std::vector<Rule> rules;
  friend bool operator==(const Block&, const Block&) = default;
};

struct Program {
  std::vector<Block> blocks;

  const Block* find(std::string_view name) const {
    for (const auto& b : blocks) {
      if (b.name == name) return &b;
    }
    return nullptr;
  }

  std::size_t rule_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.rules.size();
    return n;
  }

  // Concatenation; block names of `other` must not clash with ours.
  Program& append(const Program& other) {
    blocks.insert(blocks.end(), other.blocks.begin(), other.blocks.end());
    return *this;
  }

  friend bool operator==(const Program&, const Program&) = default;
};

// ---------------------------------------------------------------------------
// Printing. The output is canonical and re-parses to an equal AST.

inline bool is_symbol_text(std::string_view s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
              (c >= 'A' && c <= 'Z');
    if (!ok) return false;
  }
  return s != "not";
}

inline void quote_string(std::ostream& os, std::string_view s) {
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\n': os << "\\n"; break;
      case '\t': os << "\\t"; break;
      default: os << c;
    }
  }
  os << '"';
}

inline void print_term(std::ostream& os, const Term& t) {
  switch (t.kind) {
    case Term::Kind::integer: os << t.number; break;
    case Term::Kind::symbol: os << t.text; break;
    case Term::Kind::string: quote_string(os, t.text); break;
    case Term::Kind::variable: os << t.text; break;
    case Term::Kind::anonymous: os << '_'; break;
    case Term::Kind::tuple:
      os << '(';
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << ',';
        print_term(os, t.args[i]);
      }
      if (t.args.size() == 1) os << ',';
      os << ')';
      break;
    case Term::Kind::pool:
      os << '(';
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << ';';
        // A tuple alternative prints its elements bare: (a,b;c,d).
        const Term& alt = t.args[i];
        if (alt.kind == Term::Kind::tuple && alt.args.size() > 1) {
          for (std::size_t j = 0; j < alt.args.size(); ++j) {
            if (j) os << ',';
            print_term(os, alt.args[j]);
          }
        } else {
          print_term(os, alt);
        }
      }
      os << ')';
      break;
  }
}

inline void print_atom(std::ostream& os, const Atom& a) {
  os << a.predicate;
  if (a.args.empty()) return;
  os << '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) os << ',';
    print_term(os, a.args[i]);
  }
  os << ')';
}

inline void print_literal(std::ostream& os, const BodyLiteral& l) {
  switch (l.kind) {
    case BodyLiteral::Kind::positive: print_atom(os, l.atom); break;
    case BodyLiteral::Kind::negated:
      os << "not ";
      print_atom(os, l.atom);
      break;
    case BodyLiteral::Kind::comparison:
      print_term(os, l.comparison.lhs);
      os << ' ' << op_text(l.comparison.op) << ' ';
      print_term(os, l.comparison.rhs);
      break;
    case BodyLiteral::Kind::cardinality:
      os << '{';
      print_atom(os, l.cardinality.pattern);
      os << "} " << op_text(l.cardinality.op) << ' ' << l.cardinality.bound;
      break;
  }
}

inline void print_rule(std::ostream& os, const Rule& r) {
  if (const auto* atom = std::get_if<Atom>(&r.head)) {
    print_atom(os, *atom);
  } else if (const auto* choice = std::get_if<ChoiceHead>(&r.head)) {
    os << "{ ";
    print_atom(os, choice->element);
    os << ": ";
    print_atom(os, choice->condition);
    os << " } = " << choice->bound;
  }
  if (!r.body.empty()) {
    os << (r.is_constraint() ? ":- " : " :- ");
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) os << ", ";
      print_literal(os, r.body[i]);
    }
  }
  os << '.';
}

inline void print_block(std::ostream& os, const Block& b) {
  if (!b.name.empty()) os << "%% " << b.name << '\n';
  if (!b.description.empty()) {
    std::istringstream lines(b.description);
    std::string line;
    while (std::getline(lines, line)) os << "% " << line << '\n';
  }
  for (const auto& r : b.rules) {
    print_rule(os, r);
    os << '\n';
  }
}

inline void print_program(std::ostream& os, const Program& p) {
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (i) os << '\n';
    print_block(os, p.blocks[i]);
  }
}

template <typename T, typename Printer>
std::string to_text(const T& value, Printer printer) {
  std::ostringstream os;
  printer(os, value);
  return os.str();
}

inline std::string to_string(const Term& t) { return to_text(t, print_term); }
inline std::string to_string(const Atom& a) { return to_text(a, print_atom); }
inline std::string to_string(const Rule& r) { return to_text(r, print_rule); }
inline std::string to_string(const Program& p) { return to_text(p, print_program); }

// ---------------------------------------------------------------------------
// Variable collection, used by safety checks and the compiler.

inline void collect_variables(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::variable) {
    out.insert(t.text);
    return;
  }
  for (const auto& a : t.args) collect_variables(a, out);
}

inline void collect_variables(const Atom& a, std::set<std::string>& out) {
  for (const auto& t : a.args) collect_variables(t, out);
}

inline bool has_anonymous(const Term& t) {
  if (t.kind == Term::Kind::anonymous) return true;
  for (const auto& a : t.args) {
    if (has_anonymous(a)) return true;
  }
  return false;
}

inline bool has_anonymous(const Atom& a) {
  for (const auto& t : a.args) {
    if (has_anonymous(t)) return true;
  }
  return false;
}

}  // namespace draco::asp
