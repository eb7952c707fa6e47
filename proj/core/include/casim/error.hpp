#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace casim {

enum class ErrorKind {
  kInvalidModel,     // a model, table or distribution violates its invariants
  kInvalidArgument,  // an operation precondition does not hold
  kNotAllowed,       // intervention outside the model's allowed set
  kMissingRow,       // reachable prefix has no conditional-table row
  kLengthBound,      // prompt + output exceeds the context size
  kBudgetExceeded,   // exact enumeration grew past its node budget
  kParse,            // malformed document
  kSchema,           // well-formed document with the wrong shape
  kUnknownBuiltin,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `location()` is a path into the
/// offending structure (a document path, a table prefix, a turn index) and may
/// be empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string location = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& location() const noexcept { return location_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Same error with `outer` prepended to the location.
  Error nested(std::string_view outer) const;

 private:
  ErrorKind kind_;
  std::string detail_;
  std::string location_;
};

}  // namespace casim
