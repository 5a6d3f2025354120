#pragma once

#include <stdexcept>
#include <string>

namespace fixedspec {

/// Malformed or dimensionally inconsistent input.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// An exhaustive enumeration would exceed its configured cap.
class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

}  // namespace fixedspec
