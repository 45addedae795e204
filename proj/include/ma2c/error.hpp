#ifndef MA2C_ERROR_HPP
#define MA2C_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ma2c {

/// Malformed input document (JSON syntax, missing keys, wrong types).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments that break an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ma2c

#endif  // MA2C_ERROR_HPP
