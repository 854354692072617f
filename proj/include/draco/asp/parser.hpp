#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "draco/asp/ast.hpp"
#include "draco/detail/lexer.hpp"
#include "draco/error.hpp"

namespace draco::asp {

namespace detail {

using draco::detail::Token;

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(draco::detail::tokenize(text)) {}

  Program program() {
    Program prog;
    std::set<std::string> names;
    Block* current = nullptr;
    bool collecting_description = false;

    while (peek().kind != Token::Kind::end) {
      const Token& t = peek();
      if (t.kind == Token::Kind::block_header) {
        if (t.text.empty()) throw error(t, "block header without a name");
        if (!is_symbol_text(t.text)) throw error(t, "block name must be a lowercase identifier: '" + t.text + "'");
        if (!names.insert(t.text).second) throw error(t, "duplicate block name '" + t.text + "'");
        prog.blocks.push_back(Block{t.text, "", {}});
        current = &prog.blocks.back();
        collecting_description = true;
        ++pos_;
        continue;
      }
      if (t.kind == Token::Kind::comment) {
        if (collecting_description && current != nullptr) {
          if (!current->description.empty()) current->description += '\n';
          current->description += t.text;
        }
        ++pos_;
        continue;
      }
      collecting_description = false;
      if (current == nullptr) {
        prog.blocks.push_back(Block{});
        current = &prog.blocks.back();
      }
      current->rules.push_back(statement());
    }
    return prog;
  }

  // Bare statements, comments ignored.
  std::vector<Rule> statements() {
    std::vector<Rule> out;
    while (peek().kind != Token::Kind::end) {
      if (peek().kind == Token::Kind::block_header || peek().kind == Token::Kind::comment) {
        ++pos_;
        continue;
      }
      out.push_back(statement());
    }
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  const Token& next() {
    const Token& t = peek();
    if (t.kind != Token::Kind::end) ++pos_;
    return t;
  }

  static ParseError error(const Token& at, const std::string& msg) {
    return ParseError(msg, at.line, at.column);
  }

  const Token& expect(Token::Kind kind) {
    const Token& t = peek();
    if (t.kind != kind) {
      throw error(t, std::string("expected ") + draco::detail::token_name(kind) + ", found " +
                         draco::detail::token_name(t.kind) + (t.text.empty() ? "" : " '" + t.text + "'"));
    }
    return next();
  }

  bool accept(Token::Kind kind) {
    if (peek().kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }

  Rule statement() {
    const Token start = peek();
    Rule rule;
    if (accept(Token::Kind::if_)) {
      rule.body = body();
      expect(Token::Kind::dot);
    } else {
      if (peek().kind == Token::Kind::lbrace) {
        rule.head = choice_head();
      } else {
        rule.head = atom();
      }
      if (accept(Token::Kind::if_)) rule.body = body();
      expect(Token::Kind::dot);
    }
    check_rule(rule, start);
    return rule;
  }

  ChoiceHead choice_head() {
    const Token& open = expect(Token::Kind::lbrace);
    ChoiceHead head;
    head.element = atom();
    expect(Token::Kind::colon);
    head.condition = atom();
    expect(Token::Kind::rbrace);
    const Token& op = expect(Token::Kind::op);
    if (op.text != "=") throw error(op, "choice rules support only '= 1'");
    head.bound = integer();
    if (head.bound != 1) throw error(open, "choice bound must be 1");
    return head;
  }

  std::vector<BodyLiteral> body() {
    std::vector<BodyLiteral> out;
    out.push_back(literal());
    while (accept(Token::Kind::comma)) out.push_back(literal());
    return out;
  }

  BodyLiteral literal() {
    const Token& t = peek();
    if (t.kind == Token::Kind::identifier && t.text == "not") {
      ++pos_;
      return BodyLiteral::negated(atom());
    }
    if (t.kind == Token::Kind::lbrace) {
      ++pos_;
      CardinalityTest card;
      card.pattern = atom();
      expect(Token::Kind::rbrace);
      card.op = compare_op(expect(Token::Kind::op));
      card.bound = integer();
      return BodyLiteral::count(std::move(card));
    }
    if (t.kind == Token::Kind::identifier) {
      // Either an atom, or a symbol on the left of a comparison.
      if (peek(1).kind == Token::Kind::op) {
        Comparison cmp;
        cmp.lhs = term();
        cmp.op = compare_op(next());
        cmp.rhs = term();
        return BodyLiteral::compare(std::move(cmp));
      }
      return BodyLiteral::positive(atom());
    }
    Comparison cmp;
    cmp.lhs = term();
    const Token& op = peek();
    if (op.kind != Token::Kind::op) throw error(op, "expected comparison operator after term");
    ++pos_;
    cmp.op = compare_op(op);
    cmp.rhs = term();
    return BodyLiteral::compare(std::move(cmp));
  }

  static CompareOp compare_op(const Token& t) {
    if (t.text == "=") return CompareOp::eq;
    if (t.text == "!=") return CompareOp::ne;
    if (t.text == "<") return CompareOp::lt;
    if (t.text == "<=") return CompareOp::le;
    if (t.text == ">") return CompareOp::gt;
    if (t.text == ">=") return CompareOp::ge;
    throw error(t, "unknown operator '" + t.text + "'");
  }

  std::int64_t integer() {
    bool negative = accept(Token::Kind::minus);
    const Token& t = expect(Token::Kind::integer);
    return negative ? -t.number : t.number;
  }

  Atom atom() {
    const Token& name = peek();
    if (name.kind != Token::Kind::identifier || name.text == "not") {
      throw error(name, std::string("expected predicate name, found ") + draco::detail::token_name(name.kind));
    }
    ++pos_;
    Atom a;
    a.predicate = name.text;
    if (accept(Token::Kind::lparen)) {
      a.args.push_back(term());
      while (accept(Token::Kind::comma)) a.args.push_back(term());
      expect(Token::Kind::rparen);
    }
    return a;
  }

  Term term() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::integer:
        ++pos_;
        return Term::integer(t.number);
      case Token::Kind::minus:
        return Term::integer(integer());
      case Token::Kind::string:
        ++pos_;
        return Term::string(t.text);
      case Token::Kind::variable:
        ++pos_;
        return Term::variable(t.text);
      case Token::Kind::anonymous:
        ++pos_;
        return Term::anonymous();
      case Token::Kind::identifier:
        if (t.text == "not") throw error(t, "unexpected keyword 'not'");
        if (peek(1).kind == Token::Kind::lparen) throw error(t, "function terms are not supported");
        ++pos_;
        return Term::symbol(t.text);
      case Token::Kind::lparen:
        return parenthesized();
      default:
        throw error(t, std::string("expected term, found ") + draco::detail::token_name(t.kind));
    }
  }

  // `( ... )`: plain grouping, tuple, or pool.
  Term parenthesized() {
    expect(Token::Kind::lparen);
    if (accept(Token::Kind::rparen)) return Term::tuple({});

    struct Group {
      std::vector<Term> terms;
      bool trailing_comma = false;
    };
    std::vector<Group> groups(1);
    groups.back().terms.push_back(term());
    while (true) {
      if (accept(Token::Kind::comma)) {
        if (peek().kind == Token::Kind::rparen || peek().kind == Token::Kind::semicolon) {
          groups.back().trailing_comma = true;
          continue;
        }
        groups.back().terms.push_back(term());
        continue;
      }
      if (accept(Token::Kind::semicolon)) {
        groups.emplace_back();
        groups.back().terms.push_back(term());
        continue;
      }
      expect(Token::Kind::rparen);
      break;
    }
    auto collapse = [](Group& g) {
      if (g.terms.size() == 1 && !g.trailing_comma) return std::move(g.terms.front());
      return Term::tuple(std::move(g.terms));
    };
    if (groups.size() == 1) return collapse(groups.front());
    std::vector<Term> alts;
    for (auto& g : groups) alts.push_back(collapse(g));
    return Term::pool(std::move(alts));
  }

  void check_rule(const Rule& rule, const Token& at) const {
    auto unsafe = [&](const std::string& what) {
      return error(at, "unsafe rule '" + to_string(rule) + "': " + what);
    };

    std::set<std::string> positive;
    for (const auto& lit : rule.body) {
      if (lit.kind == BodyLiteral::Kind::positive) collect_variables(lit.atom, positive);
    }
    for (const auto& lit : rule.body) {
      switch (lit.kind) {
        case BodyLiteral::Kind::positive:
        case BodyLiteral::Kind::negated:
          for (const auto& t : lit.atom.args) {
            if (t.has_pool()) throw error(at, "pools are only allowed in facts");
          }
          break;
        case BodyLiteral::Kind::cardinality:
          for (const auto& t : lit.cardinality.pattern.args) {
            if (t.has_pool()) throw error(at, "pools are only allowed in facts");
          }
          break;
        case BodyLiteral::Kind::comparison:
          if (lit.comparison.lhs.has_pool() || lit.comparison.rhs.has_pool()) {
            throw error(at, "pools are only allowed in facts");
          }
          break;
      }
      if (lit.kind == BodyLiteral::Kind::negated) {
        std::set<std::string> vars;
        collect_variables(lit.atom, vars);
        for (const auto& v : vars) {
          if (!positive.count(v)) throw unsafe("variable " + v + " occurs only under negation");
        }
      } else if (lit.kind == BodyLiteral::Kind::comparison) {
        const auto& c = lit.comparison;
        if (has_anonymous_term(c.lhs) || has_anonymous_term(c.rhs)) {
          throw unsafe("anonymous variable in comparison");
        }
        std::set<std::string> vars;
        collect_variables(c.lhs, vars);
        collect_variables(c.rhs, vars);
        for (const auto& v : vars) {
          if (!positive.count(v)) throw unsafe("variable " + v + " in comparison is not bound by a positive atom");
        }
      }
    }

    if (const auto* head = rule.head_atom()) {
      if (has_anonymous(*head)) throw unsafe("anonymous variable in head");
      bool pooled = false;
      for (const auto& t : head->args) pooled = pooled || t.has_pool();
      if (pooled && !rule.body.empty()) throw error(at, "pools are only allowed in facts");
      std::set<std::string> vars;
      collect_variables(*head, vars);
      for (const auto& v : vars) {
        if (!positive.count(v)) throw unsafe("head variable " + v + " is not bound by a positive body atom");
      }
    } else if (const auto* choice = std::get_if<ChoiceHead>(&rule.head)) {
      if (has_anonymous(choice->element)) throw unsafe("anonymous variable in choice element");
      std::set<std::string> bound = positive;
      collect_variables(choice->condition, bound);
      std::set<std::string> vars;
      collect_variables(choice->element, vars);
      for (const auto& v : vars) {
        if (!bound.count(v)) throw unsafe("choice variable " + v + " is not bound by the body or condition");
      }
      for (const auto& t : choice->element.args) {
        if (t.has_pool()) throw error(at, "pools are only allowed in facts");
      }
    }
  }

  static bool has_anonymous_term(const Term& t) { return has_anonymous(t); }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses the block file format: `%% name` headers, `% description` lines
// directly below a header, then `.`-terminated statements. Statements before
// the first header land in an unnamed block.
inline Program parse_program(std::string_view text) { return detail::Parser(text).program(); }

// Parses a sequence of statements, ignoring block structure.
inline std::vector<Rule> parse_rules(std::string_view text) { return detail::Parser(text).statements(); }

}  // namespace draco::asp
