#pragma once

#include <stdexcept>
#include <string>

namespace graphscan {

/// Precondition violated by a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No cluster satisfies the sparsity (and connectivity) constraint.
class EmptyClassError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace graphscan
