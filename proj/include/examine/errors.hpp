#pragma once

#include <stdexcept>
#include <string>

namespace examine {

// Precondition or validation failure on caller-supplied data.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Request exceeds a hard enumeration guard (exact Shapley).
class SizeLimitError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Malformed file: bad magic, unsupported version, truncated payload.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine failed in a way that has no fallback.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace examine
