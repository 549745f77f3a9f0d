#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace varimhd {

// Points, vectors and gradients are embedded in R^3 for both d = 2 and d = 3.
// In two dimensions the third component (and the third row/column of every
// gradient) is identically zero.
using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;
using Mat3 = Eigen::Matrix3d;
using Coefficients = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Invalid user input (configuration, shapes, dimensions).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite velocity encountered while integrating a trajectory.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, const Vec3& x)
      : std::runtime_error(what), time(t), position(x) {}
  double time;
  Vec3 position;
};

/// Broken mesh invariant: degenerate element, open mesh or flipped orientation.
class MeshQualityError : public std::runtime_error {
 public:
  MeshQualityError(const std::string& what, long element_id)
      : std::runtime_error(what), element(element_id) {}
  long element;
};

/// Non-finite quadrature result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fixed-point window did not converge within its iteration budget.
class WindowFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The window length fell below its lower limit without convergence.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace varimhd
