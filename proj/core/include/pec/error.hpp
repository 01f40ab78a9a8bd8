#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownLabelError : public Error {
 public:
  UnknownLabelError(std::string label, std::size_t line)
      : Error("line " + std::to_string(line) + ": unknown emotion label \"" + label + "\""),
        label_(std::move(label)),
        line_(line) {}
  const std::string& label() const noexcept { return label_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string label_;
  std::size_t line_;
};

/// Invalid configuration or precondition violation (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch, non-finite values, divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Collects non-fatal warnings from loaders.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

}  // namespace pec
