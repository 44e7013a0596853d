#pragma once

#include <stdexcept>
#include <string>

namespace gbt {

// Bad user input: malformed files, out-of-range configuration values.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A beam whose Q matrix is singular or whose Gaussian profile does not decay.
class DegenerateBeamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gbt
