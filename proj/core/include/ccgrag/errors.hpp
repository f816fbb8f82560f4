#pragma once

#include <stdexcept>
#include <string>

namespace ccgrag {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedLanguage : Error {
  using Error::Error;
};
struct ParseFailure : Error {
  using Error::Error;
};
struct AnchorNotFound : Error {
  using Error::Error;
};
struct EmptyContext : Error {
  using Error::Error;
};
struct NoSourceFiles : Error {
  using Error::Error;
};
struct VersionMismatch : Error {
  using Error::Error;
};
struct EmptyDatabase : Error {
  using Error::Error;
};
struct InvalidGamma : Error {
  using Error::Error;
};
struct InsufficientEligibleLines : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// External-service failures carry the HTTP status (0 for transport errors).
struct EndpointError : Error {
  int status;
  EndpointError(int status_, const std::string& what_) : Error(what_), status(status_) {}
};
struct TimeoutError : Error {
  using Error::Error;
};
struct BudgetExceeded : Error {
  using Error::Error;
};

}  // namespace ccgrag
