#pragma once

#include <stdexcept>
#include <string>

namespace wdn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (syntax, missing or unknown fields, wrong types).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A network invariant does not hold. `rule()` names the violated rule.
class ValidationError : public Error {
 public:
  ValidationError(std::string rule, const std::string& detail)
      : Error(rule + ": " + detail), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

class MultiSourceError : public ValidationError {
 public:
  explicit MultiSourceError(const std::string& detail)
      : ValidationError("single-source", detail) {}
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DisconnectedError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Wraps any fault raised inside a solver adapter.
class AdapterError : public Error {
 public:
  using Error::Error;
};

}  // namespace wdn
