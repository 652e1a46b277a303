#pragma once

#include <stdexcept>
#include <string>

namespace fbst {

/// Input does not have the expected shape (missing column, empty file, bad CPT document).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A line of input could not be parsed.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fbst
