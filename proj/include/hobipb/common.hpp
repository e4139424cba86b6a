#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hobipb {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInv4Pi = 1.0 / (4.0 * std::numbers::pi);

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Structural mesh defects (open edges, inconsistent orientation, bad normals).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Degenerate geometry: coincident points, zero-length chords, vanishing Jacobians.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A Green's function or kernel was evaluated at coincident points.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual, int iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}
  double best_residual() const noexcept { return best_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

/// An operation was called on inputs outside its domain (e.g. an off-center
/// charge handed to the closed-form centered solution).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace hobipb
