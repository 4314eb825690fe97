#pragma once

#include <stdexcept>
#include <string>

namespace nk {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain (degree overflow, t out of range, f1 = 0, ...).
struct DomainError : Error {
  using Error::Error;
};

// A 3-form or jet that fails the stability conditions.
struct NotStableError : Error {
  using Error::Error;
};

// Vanishing denominator of the h- or p-system.
struct SingularError : Error {
  using Error::Error;
};

// A numerical procedure that did not reach its accuracy target.
struct NumericalError : Error {
  using Error::Error;
};

// Internal cross-checks that should never fail on valid input.
struct ConsistencyError : Error {
  using Error::Error;
};

}  // namespace nk
