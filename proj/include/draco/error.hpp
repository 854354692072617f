#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace draco {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text could not be parsed. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_{line},
        column_{column} {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A chart specification or fact list breaks the data model.
class ModelError : public Error {
 public:
  using Error::Error;
};

// A rule program is malformed beyond syntax: unsafe rules, unstratifiable
// negation, choice rules where they are not allowed.
class ProgramError : public Error {
 public:
  using Error::Error;
};

// Evaluation hit a condition the evaluator cannot handle.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Knowledge base validation failure. Carries every problem found.
class KbError : public Error {
 public:
  explicit KbError(std::vector<std::string> problems)
      : Error(join(problems)), problems_{std::move(problems)} {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out = "invalid knowledge base";
    for (const auto& p : problems) {
      out += "\n  - ";
      out += p;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

// A spec handed to the solver lacks a required attribute.
class IncompleteSpecError : public Error {
 public:
  explicit IncompleteSpecError(std::vector<std::string> missing)
      : Error(join(missing)), missing_{std::move(missing)} {}

  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  static std::string join(const std::vector<std::string>& missing) {
    std::string out = "incomplete specification, missing:";
    for (const auto& m : missing) {
      out += ' ';
      out += m;
    }
    return out;
  }

  std::vector<std::string> missing_;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

class LearnError : public Error {
 public:
  using Error::Error;
};

}  // namespace draco
