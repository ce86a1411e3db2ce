#pragma once

#include <stdexcept>
#include <string>

namespace gaugeforms {

/// Base class of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different meshes or have incompatible degrees.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// A form degree is out of range for the requested operation.
class DegreeError : public Error {
 public:
  using Error::Error;
};

/// An input failed a numerical precondition (flatness, horizontality, ...).
/// The offending residual and the threshold it was compared with are kept.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, double residual, double threshold)
      : Error(what + " (residual " + std::to_string(residual) + ", threshold " +
              std::to_string(threshold) + ")"),
        residual_(residual),
        threshold_(threshold) {}
  double residual() const { return residual_; }
  double threshold() const { return threshold_; }

 private:
  double residual_;
  double threshold_;
};

/// An iterative solve stopped before reaching its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : Error(what + " after " + std::to_string(iterations) + " iterations (relative residual " +
              std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace gaugeforms
