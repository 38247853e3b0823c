#ifndef XOVER_TYPES_HPP
#define XOVER_TYPES_HPP

#include <stdexcept>
#include <string>

namespace xover {

// Input that violates a documented precondition (bad labels, non-PD matrix,
// malformed file, unsupported shape).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerically degenerate result (singular Q, non-estimable design where
// estimability is required).
class DegeneracyError : public std::runtime_error {
public:
  explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / stream failure.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration space exceeds the configured cap.
class SizeError : public std::runtime_error {
public:
  explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

struct Tolerances {
  // Relative threshold below which an eigenvalue counts as zero
  // (relative to the largest |eigenvalue| of the matrix at hand).
  double eig_tol = 1e-9;
  // Absolute max-abs threshold for symmetry checks.
  double sym_tol = 1e-10;

  void validate() const {
    if (!(eig_tol > 0.0) || !(sym_tol > 0.0))
      throw ValidationError("Tolerances must be strictly positive");
  }
};

} // namespace xover

#endif
