#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "draco/error.hpp"

namespace draco::detail {

struct Token {
  enum class Kind {
    identifier,  // lowercase-initial name (symbol or predicate)
    variable,    // uppercase-initial or underscore-prefixed name
    anonymous,   // `_`
    integer,
    string,
    lparen,
    rparen,
    lbrace,
    rbrace,
    comma,
    semicolon,
    colon,
    dot,
    if_,  // :-
    op,   // = != < <= > >=
    minus,
    block_header,  // `%% name` at the start of a line
    comment,       // `% text` at the start of a line (text without the `% `)
    end,
  };

  Kind kind = Kind::end;
  std::string text;
  std::int64_t number = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline const char* token_name(Token::Kind k) {
  switch (k) {
    case Token::Kind::identifier: return "identifier";
    case Token::Kind::variable: return "variable";
    case Token::Kind::anonymous: return "'_'";
    case Token::Kind::integer: return "integer";
    case Token::Kind::string: return "string";
    case Token::Kind::lparen: return "'('";
    case Token::Kind::rparen: return "')'";
    case Token::Kind::lbrace: return "'{'";
    case Token::Kind::rbrace: return "'}'";
    case Token::Kind::comma: return "','";
    case Token::Kind::semicolon: return "';'";
    case Token::Kind::colon: return "':'";
    case Token::Kind::dot: return "'.'";
    case Token::Kind::if_: return "':-'";
    case Token::Kind::op: return "comparison operator";
    case Token::Kind::minus: return "'-'";
    case Token::Kind::block_header: return "block header";
    case Token::Kind::comment: return "comment";
    case Token::Kind::end: return "end of input";
  }
  return "?";
}

// Splits rule/fact text into tokens. Comments that start a line are kept as
// tokens (the program parser reads block headers and descriptions from them);
// trailing comments are dropped.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  bool line_start = true;  // only whitespace seen so far on this line

  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
        line_start = true;
      } else {
        ++col;
      }
    }
  };
  auto fail = [&](const std::string& msg) -> ParseError { return ParseError(msg, line, col); };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance();
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;

    if (c == '%') {
      std::size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = src.size();
      std::string_view body = src.substr(i, end - i);
      if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
      if (line_start && body.size() >= 2 && body[1] == '*') {
        // %* block comment *%
        std::size_t close = src.find("*%", i + 2);
        if (close == std::string_view::npos) throw fail("unterminated block comment");
        advance(close + 2 - i);
        continue;
      }
      if (line_start) {
        if (body.size() >= 2 && body[1] == '%') {
          std::string_view name = body.substr(2);
          while (!name.empty() && (name.front() == ' ' || name.front() == '\t')) name.remove_prefix(1);
          while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.remove_suffix(1);
          tok.kind = Token::Kind::block_header;
          tok.text = std::string(name);
        } else {
          std::string_view text = body.substr(1);
          if (!text.empty() && text.front() == ' ') text.remove_prefix(1);
          tok.kind = Token::Kind::comment;
          tok.text = std::string(text);
        }
        out.push_back(std::move(tok));
      }
      advance(end - i);
      continue;
    }

    line_start = false;
    if (c == '#') {
      std::size_t j = i + 1;
      while (j < src.size() && std::isalpha(static_cast<unsigned char>(src[j]))) ++j;
      throw fail("unsupported directive '" + std::string(src.substr(i, j - i)) + "'");
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      tok.kind = Token::Kind::integer;
      tok.text = std::string(src.substr(i, j - i));
      try {
        tok.number = std::stoll(tok.text);
      } catch (const std::out_of_range&) {
        throw fail("integer out of range: " + tok.text);
      }
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\'')) {
        ++j;
      }
      tok.text = std::string(src.substr(i, j - i));
      if (tok.text == "_") {
        tok.kind = Token::Kind::anonymous;
      } else if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
        tok.kind = Token::Kind::variable;
      } else {
        tok.kind = Token::Kind::identifier;
      }
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < src.size()) {
        char d = src[j];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\') {
          if (j + 1 >= src.size()) break;
          char e = src[j + 1];
          switch (e) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '"': value += '"'; break;
            case '\\': value += '\\'; break;
            default: throw ParseError(std::string("unknown escape '\\") + e + "'", line, col + (j - i));
          }
          j += 2;
          continue;
        }
        value += d;
        ++j;
      }
      if (!closed) throw fail("unterminated string");
      tok.kind = Token::Kind::string;
      tok.text = std::move(value);
      advance(j + 1 - i);
      out.push_back(std::move(tok));
      continue;
    }

    auto two = src.substr(i, 2);
    auto simple = [&](Token::Kind k, std::size_t n) {
      tok.kind = k;
      tok.text = std::string(src.substr(i, n));
      advance(n);
      out.push_back(tok);
    };
    if (two == ":-") { simple(Token::Kind::if_, 2); continue; }
    if (two == "!=" || two == "<=" || two == ">=") { simple(Token::Kind::op, 2); continue; }
    switch (c) {
      case '(': simple(Token::Kind::lparen, 1); continue;
      case ')': simple(Token::Kind::rparen, 1); continue;
      case '{': simple(Token::Kind::lbrace, 1); continue;
      case '}': simple(Token::Kind::rbrace, 1); continue;
      case ',': simple(Token::Kind::comma, 1); continue;
      case ';': simple(Token::Kind::semicolon, 1); continue;
      case ':': simple(Token::Kind::colon, 1); continue;
      case '.': simple(Token::Kind::dot, 1); continue;
      case '-': simple(Token::Kind::minus, 1); continue;
      case '=':
      case '<':
      case '>': simple(Token::Kind::op, 1); continue;
      default: break;
    }
    throw fail(std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Token::Kind::end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

}  // namespace draco::detail
