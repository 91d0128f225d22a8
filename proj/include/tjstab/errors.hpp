#pragma once

#include <stdexcept>
#include <string>

namespace tjstab {

// Invalid geometric or spectral parameters (kl >= pi/6, x outside case range, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched grid shapes between leaves / samples.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Spine compatibility (or another linear constraint) violated beyond tolerance.
struct ConstraintError : std::runtime_error {
  explicit ConstraintError(const std::string& msg) : std::runtime_error(msg) {}
};

// Ill-conditioned or non-convergent numerical solve.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed run configuration (CLI / ini file).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failed file write.
struct IOError : std::runtime_error {
  explicit IOError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tjstab
