#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lagp {

/// Broad failure classes. The CLI maps these onto exit codes.
enum class ErrorKind {
  usage,      // invalid arguments or unmet preconditions
  data,       // malformed input, dimension mismatch, out-of-domain values
  numerical,  // factorization breakdown, degenerate designs
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
      return "usage";
    case ErrorKind::data:
      return "data";
    case ErrorKind::numerical:
      return "numerical";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

namespace detail {

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (cond) return;
  switch (kind) {
    case ErrorKind::usage:
      throw UsageError(msg);
    case ErrorKind::data:
      throw DataError(msg);
    case ErrorKind::numerical:
      throw NumericalError(msg);
  }
}

}  // namespace detail
}  // namespace lagp
