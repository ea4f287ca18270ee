#pragma once

#include <stdexcept>
#include <string>

namespace mdpr {

enum class ErrorKind {
  InvalidArgument,   // caller broke a precondition (bad index, bad beta, ...)
  InputError,        // malformed model file or spec
  NotTransient,      // a linear system that should be transient is not
  Certification,     // Assumption T / HT could not be certified
  Numeric,           // solver failed to converge or produced non-finite values
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mdpr
