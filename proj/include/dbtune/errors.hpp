#pragma once

#include <stdexcept>

namespace dbtune {

// Bad configuration, bad input files, off-ladder sizes. Mapped to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem and stream failures. Mapped to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dbtune
