#pragma once

#include <stdexcept>
#include <string>

namespace slide {

// Bad arguments or malformed input. The CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A bounded-effort operation ran out of budget (retries, enumeration size,
// sample caps). The CLI maps these to exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slide
