#pragma once

#include <stdexcept>
#include <string>

namespace gibbslab {

// Preconditions use std::invalid_argument; the types below cover failures that
// only show up while computing.

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A requested truncation or tensor does not fit the configured memory budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gibbslab
