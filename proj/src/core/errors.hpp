#pragma once

#include <stdexcept>
#include <string>

namespace schedlaw {

// Rejected input: bad spec fields, malformed files, out-of-range arguments.
// CLI maps this to exit code 1.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric failure: singular denominators, degenerate optima, too little data
// for a fit. CLI maps this to exit code 2.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too few usable points for a fit or exam; a numeric failure with its own
// C-API status code.
class insufficient_data_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

}  // namespace schedlaw
