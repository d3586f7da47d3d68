#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occ {

enum class ErrorKind {
  Domain,
  InvariantViolation,
  Degenerate,
  UndefinedPsi,
  NoBracket,
  MaxIter,
  NonFinite,
  Singular,
  Empty,
  AllDropped,
  MalformedCell,
  RaggedRows,
  EmptyFile,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Input errors are the caller's fault (bad file, bad flag, violated invariant);
// everything else is a numerical failure on otherwise valid input.
bool is_input_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace occ
