#pragma once

#include <stdexcept>
#include <string>

namespace mlb {

// Numeric values match the C API status codes and the CLI exit codes.
enum class ErrorCode {
  invalid_argument = 1,
  parse = 2,
  cap_exceeded = 3,
  unsatisfiable = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::parse, what) {}
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& what)
      : Error(ErrorCode::cap_exceeded, what) {}
};

// No assignment satisfies the constraints, so P(e) = 0 is proven.
class Unsatisfiable : public Error {
 public:
  explicit Unsatisfiable(const std::string& what)
      : Error(ErrorCode::unsatisfiable, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

}  // namespace mlb
