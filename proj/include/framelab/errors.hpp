#pragma once

#include <stdexcept>
#include <string>

namespace framelab {

// Malformed user input: bad edge lists, generator specs, out-of-range indices.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine failed to converge or produced a singular operator.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration requested beyond its size cap.
class ScaleCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace framelab
