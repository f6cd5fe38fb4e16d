#pragma once

#include <stdexcept>
#include <string>

namespace lisaforge {

/// Raised by the parser on malformed input; carries 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error(message + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Raised when a construction exceeds its resource cap.  `kind` tells the
/// caller which cap tripped; the CLI maps every kind to exit code 2.
class BudgetExceeded : public std::runtime_error {
 public:
  enum class Kind { ExplicitStates, BddNodes };

  BudgetExceeded(Kind kind, std::uint64_t limit)
      : std::runtime_error(std::string("budget exceeded: ") +
                           (kind == Kind::ExplicitStates ? "explicit state cap "
                                                         : "bdd node cap ") +
                           std::to_string(limit)),
        kind_(kind),
        limit_(limit) {}

  Kind kind() const { return kind_; }
  std::uint64_t limit() const { return limit_; }

 private:
  Kind kind_;
  std::uint64_t limit_;
};

}  // namespace lisaforge
