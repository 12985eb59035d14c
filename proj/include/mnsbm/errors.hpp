#pragma once

#include <stdexcept>
#include <string>

namespace mnsbm {

// Bad argument or violated precondition. The CLI maps this to exit code 2.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Hold-out split cannot be drawn from the given graph.
class InfeasibleSplitError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// File system or stream failure. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mnsbm
