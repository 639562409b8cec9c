#pragma once

#include <stdexcept>
#include <string>

namespace lager {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or invalid input: bad files, invariant violations, unknown names.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-generic configurations, singular derivatives,
// degenerate distances.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lager
