#pragma once

#include <stdexcept>
#include <string>

namespace threadtrace {

/// Caller passed a value outside an operation's precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An encoded file (PNG or JSON) violates its declared format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data is well-formed but unusable (non-finite samples, missing files).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scene generation could not satisfy its constraints within the retry budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Segment linking had segments to work with but every one was filtered out.
class EmptyLinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace threadtrace
