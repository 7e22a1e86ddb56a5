#pragma once

#include <stdexcept>
#include <string>

namespace glakepos {

// Bad input data: malformed masks, schema violations, mismatched pairs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem or codec failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace glakepos
