#pragma once

#include <stdexcept>
#include <string>

namespace qshap {

/// Malformed configuration, schema violation or otherwise invalid input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested computation exceeds the configured resource caps.
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric failure: singular mitigation matrix, non-finite kernel entries, ...
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qshap
