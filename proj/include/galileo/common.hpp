#ifndef GALILEO_COMMON_HPP
#define GALILEO_COMMON_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace galileo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec10 = Eigen::Matrix<double, 10, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat10 = Eigen::Matrix<double, 10, 10>;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat23 = Eigen::Matrix<double, 2, 3>;

// Below this rotation angle every closed form switches to its Taylor expansion.
inline constexpr double kSmallAngle = 1e-6;

inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates the invariant of its type (non-orthonormal rotation, wrong radius, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Input lies outside the principal domain of a logarithm or chart.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A Jacobian or linear system is singular or too badly conditioned to be trusted.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// The filter produced non-finite or indefinite covariance.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

inline Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

}  // namespace galileo

#endif  // GALILEO_COMMON_HPP
