#pragma once

#include <stdexcept>
#include <string>

namespace arimacast {

enum class ErrorKind {
  InsufficientData,
  DegenerateSeries,
  Domain,
  DegreesOfFreedom,
  HorizonTooLong,
  Convergence,
  SearchFailure,
  Parse,
  DataIntegrity,
};

inline const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::InsufficientData: return "insufficient-data";
  case ErrorKind::DegenerateSeries: return "degenerate-series";
  case ErrorKind::Domain: return "domain";
  case ErrorKind::DegreesOfFreedom: return "degrees-of-freedom";
  case ErrorKind::HorizonTooLong: return "horizon-too-long";
  case ErrorKind::Convergence: return "convergence";
  case ErrorKind::SearchFailure: return "search-failure";
  case ErrorKind::Parse: return "parse";
  case ErrorKind::DataIntegrity: return "data-integrity";
  }
  return "unknown";
}

// Base of every error thrown by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// CLI exit status: 2 validation, 3 convergence, 4 data integrity.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Convergence:
  case ErrorKind::SearchFailure:
    return 3;
  case ErrorKind::Parse:
  case ErrorKind::DataIntegrity:
    return 4;
  default:
    return 2;
  }
}

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string &what) {
  if (!cond)
    fail(kind, what);
}

} // namespace detail
} // namespace arimacast
