#pragma once

#include <stdexcept>
#include <string>

namespace odormap {

// Domain error: bad input data, violated preconditions, I/O failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace odormap
