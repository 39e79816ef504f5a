#pragma once

#include <stdexcept>
#include <string>

namespace nandwalk {

/// Malformed leaf bitstring.
class ParseError : public std::invalid_argument {
 public:
  enum class Kind { Empty, IllegalCharacter, NonPowerOfTwo, TooShallow };

  ParseError(Kind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A projective recursion step produced (0, 0).
class DegenerateValue : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested operation exceeds the configured dense-eigensolver cap.
class CapExceeded : public std::length_error {
  using std::length_error::length_error;
};

/// Chebyshev expansion needs more terms than the coefficient budget allows.
class ConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nandwalk
