#pragma once

#include <stdexcept>
#include <string>

namespace receptive {

// Malformed or degenerate input data (bad CSV row, single-class training set,
// unknown config key). CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariant. CLI maps this to exit code 4.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace receptive
