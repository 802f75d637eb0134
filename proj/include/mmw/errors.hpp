#pragma once

#include <stdexcept>
#include <string>

namespace mmw {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Mode-count or vector-length mismatch between operands.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

// Invalid argument value (occupation out of range, bad partition, ...).
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(what) {}
};

// Operation not defined for this input (e.g. a 3-mode criterion on 4 modes).
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error(what) {}
};

// Problem size exceeds a configured cap (dense oracle).
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(what) {}
};

}  // namespace mmw
