#include "occ/error.hpp"

namespace occ {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::UndefinedPsi: return "UndefinedPsi";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::MaxIter: return "MaxIter";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::Empty: return "Empty";
    case ErrorKind::AllDropped: return "AllDropped";
    case ErrorKind::MalformedCell: return "MalformedCell";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain:
    case ErrorKind::InvariantViolation:
    case ErrorKind::MalformedCell:
    case ErrorKind::RaggedRows:
    case ErrorKind::EmptyFile:
    case ErrorKind::Io:
    case ErrorKind::Empty:
      return true;
    default:
      return false;
  }
}

}  // namespace occ
