#pragma once

#include <stdexcept>
#include <string>

namespace cubeval {

// Malformed or out-of-contract arguments (CLI exit code 2).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Arithmetic would leave the supported 128-bit range (CLI exit code 2).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A documented work or memory cap was exceeded (CLI exit code 3).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The request falls outside the cases with an exact treatment, e.g. a closed
// form asked for at a singular prime (CLI exit code 2).
class Unsupported : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cubeval
