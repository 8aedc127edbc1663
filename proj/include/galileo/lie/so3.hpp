#ifndef GALILEO_LIE_SO3_HPP
#define GALILEO_LIE_SO3_HPP

#include <cmath>

#include "galileo/common.hpp"

namespace galileo {

/// Rotation matrix with the SO(3) invariants (R^T R = I, det R = +1) enforced at construction.
class Rot3 {
 public:
  Rot3() : m_(Mat3::Identity()) {}

  /// Validates orthonormality and orientation to `tol`; throws InvariantError otherwise.
  static Rot3 from_matrix(const Mat3& m, double tol = 1e-9) {
    if (!m.allFinite() || (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() > tol ||
        std::abs(m.determinant() - 1.0) > tol) {
      throw InvariantError("Rot3: matrix is not a proper rotation");
    }
    return Rot3(m);
  }

  /// Caller guarantees the invariants (products and exponentials of rotations).
  static Rot3 unchecked(const Mat3& m) { return Rot3(m); }

  static Rot3 from_quaternion(const Eigen::Quaterniond& q) {
    return Rot3(q.normalized().toRotationMatrix());
  }

  const Mat3& matrix() const { return m_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(m_).normalized(); }

  Rot3 inverse() const { return Rot3(m_.transpose()); }
  Rot3 operator*(const Rot3& other) const { return Rot3(m_ * other.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// Projects back onto SO(3); accumulated round-off after long products.
  Rot3 normalized() const { return from_quaternion(Eigen::Quaterniond(m_)); }

 private:
  explicit Rot3(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

namespace so3 {

namespace detail {

// Coefficients of the Rodrigues-type series in phi = ||theta||. The two
// higher-order ones cancel catastrophically in closed form, so they switch to
// their Taylor series well above kSmallAngle.
inline constexpr double kSeriesAngle = 0.3;

inline double sinc(double phi) {
  if (phi < kSmallAngle) return 1.0 - phi * phi / 6.0;
  return std::sin(phi) / phi;
}

// (1 - cos phi) / phi^2
inline double one_minus_cos_over_sq(double phi) {
  if (phi < kSmallAngle) return 0.5 - phi * phi / 24.0;
  const double s = std::sin(0.5 * phi);
  return 2.0 * s * s / (phi * phi);
}

// (phi - sin phi) / phi^3 = sum (-phi^2)^m / (2m+3)!
inline double phi_minus_sin_over_cube(double phi) {
  if (phi < kSeriesAngle) {
    const double x = -phi * phi;
    double term = 1.0 / 6.0, sum = 0.0;
    for (int m = 0; m < 8; ++m) {
      sum += term;
      term *= x / double((2 * m + 4) * (2 * m + 5));
    }
    return sum;
  }
  return (phi - std::sin(phi)) / (phi * phi * phi);
}

// (phi^2/2 - 1 + cos phi) / phi^4 = sum (-phi^2)^m / (2m+4)!
inline double cos_remainder_over_quartic(double phi) {
  if (phi < kSeriesAngle) {
    const double x = -phi * phi;
    double term = 1.0 / 24.0, sum = 0.0;
    for (int m = 0; m < 8; ++m) {
      sum += term;
      term *= x / double((2 * m + 5) * (2 * m + 6));
    }
    return sum;
  }
  const double s = std::sin(0.5 * phi);
  const double phi2 = phi * phi;
  return (0.5 * phi2 - 2.0 * s * s) / (phi2 * phi2);
}

}  // namespace detail

inline Rot3 exp(const Vec3& theta) {
  const double phi = theta.norm();
  const Mat3 w = skew(theta);
  return Rot3::unchecked(Mat3::Identity() + detail::sinc(phi) * w +
                         detail::one_minus_cos_over_sq(phi) * w * w);
}

/// Principal logarithm, ||result|| <= pi.
inline Vec3 log(const Rot3& r) {
  Eigen::Quaterniond q(r.matrix());
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double n = v.norm();
  const double w = q.w();
  double scale;
  if (n < kSmallAngle) {
    // 2 atan(n / w) / n, expanded about n = 0
    scale = 2.0 / w * (1.0 - n * n / (3.0 * w * w));
  } else {
    scale = 2.0 * std::atan2(n, w) / n;
  }
  return scale * v;
}

/// Jr(theta): Exp(theta + d) ~ Exp(theta) Exp(Jr d).
inline Mat3 right_jacobian(const Vec3& theta) {
  const double phi = theta.norm();
  const Mat3 w = skew(theta);
  return Mat3::Identity() - detail::one_minus_cos_over_sq(phi) * w +
         detail::phi_minus_sin_over_cube(phi) * w * w;
}

inline Mat3 right_jacobian_inverse(const Vec3& theta) {
  const double phi2 = theta.squaredNorm();
  const double phi = std::sqrt(phi2);
  const Mat3 w = skew(theta);
  if (phi < kSmallAngle) {
    return Mat3::Identity() + 0.5 * w + (1.0 / 12.0) * w * w;
  }
  const double c = 1.0 / phi2 - (1.0 + std::cos(phi)) / (2.0 * phi * std::sin(phi));
  return Mat3::Identity() + 0.5 * w + c * w * w;
}

/// Jl(theta) = Jr(-theta); also the V matrix of the SE(3)/SGal(3) exponentials.
inline Mat3 left_jacobian(const Vec3& theta) { return right_jacobian(-theta); }

inline Mat3 left_jacobian_inverse(const Vec3& theta) { return right_jacobian_inverse(-theta); }

}  // namespace so3

inline Rot3 oplus(const Rot3& x, const Vec3& tau) { return x * so3::exp(tau); }
inline Vec3 ominus(const Rot3& y, const Rot3& x) { return so3::log(x.inverse() * y); }

}  // namespace galileo

#endif  // GALILEO_LIE_SO3_HPP
