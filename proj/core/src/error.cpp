#include "casim/error.hpp"

namespace casim {

namespace {

std::string compose(ErrorKind kind, const std::string& message, const std::string& location) {
  std::string out(to_string(kind));
  if (!location.empty()) out += " at " + location;
  out += ": " + message;
  return out;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidModel: return "invalid model";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kNotAllowed: return "intervention not allowed";
    case ErrorKind::kMissingRow: return "missing table row";
    case ErrorKind::kLengthBound: return "length bound violated";
    case ErrorKind::kBudgetExceeded: return "node budget exceeded";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kSchema: return "schema violation";
    case ErrorKind::kUnknownBuiltin: return "unknown builtin";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorKind kind, std::string message, std::string location)
    : std::runtime_error(compose(kind, message, location)),
      kind_(kind),
      detail_(std::move(message)),
      location_(std::move(location)) {}

Error Error::nested(std::string_view outer) const {
  std::string loc(outer);
  if (!location_.empty()) {
    if (location_.front() != '/' && !loc.empty()) loc += ' ';
    loc += location_;
  }
  return Error(kind_, detail_, std::move(loc));
}

}  // namespace casim
