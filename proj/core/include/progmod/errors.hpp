#pragma once

#include <stdexcept>
#include <string>

namespace progmod {

// Raised when the input data (matrix, table, hypotheses, model file) cannot
// support the requested computation. The CLI maps this to exit code 2,
// anything else unexpected to 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace progmod
