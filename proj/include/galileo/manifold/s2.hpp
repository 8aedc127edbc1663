#ifndef GALILEO_MANIFOLD_S2_HPP
#define GALILEO_MANIFOLD_S2_HPP

#include <algorithm>
#include <cmath>

#include "galileo/lie/so3.hpp"

namespace galileo {

/// Point on the sphere S^2(r). Holds the gravity vector of the filter state.
class SpherePoint {
 public:
  static constexpr double kDefaultRadius = 9.81;

  SpherePoint() : vec_(0.0, 0.0, -kDefaultRadius), radius_(kDefaultRadius) {}

  /// Throws InvariantError unless ||v|| = radius to 1e-9 (relative for r > 1).
  SpherePoint(const Vec3& v, double radius) : vec_(v), radius_(radius) {
    if (!(radius > 0.0) || !v.allFinite() ||
        std::abs(v.norm() - radius) > 1e-9 * std::max(1.0, radius)) {
      throw InvariantError("SpherePoint: vector norm does not match radius");
    }
  }

  /// Radius taken from the vector itself.
  static SpherePoint from_vector(const Vec3& v) { return SpherePoint(v, v.norm()); }

  /// Rescales `v` onto the sphere of the given radius.
  static SpherePoint projected(const Vec3& v, double radius) {
    return SpherePoint(v * (radius / v.norm()), radius);
  }

  const Vec3& vector() const { return vec_; }
  double radius() const { return radius_; }

 private:
  Vec3 vec_;
  double radius_;
};

/// Chart increment on S^2; a 2-vector, deliberately distinct from the 3-vector body rate of boxplus.
using SphereTangent = Vec2;

namespace s2 {

// ||x cross y|| / r^2 below this uses the first-order atan2 ~ y branch.
inline constexpr double kFirstOrderThreshold = 1e-7;
// x.y / r^2 below -1 + this is treated as antipodal.
inline constexpr double kAntipodalThreshold = 1e-9;
// ||e3 cross x_hat|| below this counts as parallel to e3 when building the basis.
inline constexpr double kBasisParallelThreshold = 1e-12;

/// B(x) = R(x) [e1 e2], where R(x) rotates e3 onto x/r about e3 x x.
/// At x = -r e3 the rotation is the half turn about e1.
inline Mat32 basis(const SpherePoint& x) {
  const Vec3 u = x.vector() / x.radius();
  const Vec3 axis = Vec3::UnitZ().cross(u);
  const double s = axis.norm();
  Mat3 r;
  if (s < kBasisParallelThreshold) {
    r = u.z() > 0.0 ? Mat3::Identity() : Mat3(Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal());
  } else {
    r = so3::exp(axis / s * std::atan2(s, u.z())).matrix();
  }
  return r.leftCols<2>();
}

inline SpherePoint oplus(const SpherePoint& x, const SphereTangent& tau) {
  if (tau.isZero(0.0)) return x;
  const Vec3 y = so3::exp(basis(x) * tau) * x.vector();
  return SpherePoint::projected(y, x.radius());
}

/// y - x in the chart at x. Antipodal points map to (pi, 0).
inline SphereTangent ominus(const SpherePoint& y, const SpherePoint& x) {
  const double r = x.radius();
  if (std::abs(y.radius() - r) > 1e-9 * std::max(1.0, r)) {
    throw InvariantError("s2::ominus: radius mismatch");
  }
  const double r2 = r * r;
  const Vec3 c = x.vector().cross(y.vector());
  const double s = c.norm();
  const double d = x.vector().dot(y.vector());
  if (d / r2 < -1.0 + kAntipodalThreshold) return SphereTangent(kPi, 0.0);
  const Mat32 b = basis(x);
  if (s / r2 < kFirstOrderThreshold) return b.transpose() * c / r2;
  return b.transpose() * (std::atan2(s, d) / s * c);
}

/// x_{k+1} = Exp(omega dt)^T x_k, the body-frame evolution of a fixed world direction.
inline SpherePoint boxplus(const SpherePoint& x, const Vec3& omega_dt) {
  const Vec3 y = so3::exp(omega_dt).matrix().transpose() * x.vector();
  return SpherePoint::projected(y, x.radius());
}

/// d(y - x)/dy in ambient coordinates. Throws ConditioningError for antipodal input.
inline Mat23 ominus_jacobian_wrt_y(const SpherePoint& x, const SpherePoint& y) {
  const double r = x.radius();
  const double r2 = r * r;
  const Vec3& xv = x.vector();
  const Vec3 c = xv.cross(y.vector());
  const double s = c.norm();
  const double d = xv.dot(y.vector());
  if (d / r2 < -1.0 + kAntipodalThreshold) {
    throw ConditioningError("s2::ominus_jacobian_wrt_y: antipodal points, axis undefined");
  }
  const Mat32 b = basis(x);
  const Mat3 xx = skew(xv);
  if (s / r2 < kFirstOrderThreshold) return b.transpose() * xx / r2;

  const Vec3 c_hat = c / s;
  const double theta = std::atan2(s, d);
  const Eigen::RowVector3d dtheta =
      (d * (c_hat.transpose() * xx) - s * xv.transpose()) / (s * s + d * d);
  const Mat3 dir = theta / s * (Mat3::Identity() - c_hat * c_hat.transpose()) * xx;
  return b.transpose() * (c_hat * dtheta + dir);
}

/// d(x + t)/dt at t = tau, a 3x2 map into the ambient tangent plane at x + tau.
inline Mat32 oplus_jacobian(const SpherePoint& x, const SphereTangent& tau) {
  const Mat32 b = basis(x);
  const Vec3 phi = b * tau;
  const Mat3 rot = so3::exp(phi).matrix();
  return -skew(rot * x.vector()) * rot * so3::right_jacobian(phi) * b;
}

/// d((x + delta) - ref)/d delta at delta = tau; the chart transition between x and ref.
inline Mat2 chart_transition(const SpherePoint& x, const SphereTangent& tau, const SpherePoint& ref) {
  return ominus_jacobian_wrt_y(ref, oplus(x, tau)) * oplus_jacobian(x, tau);
}

}  // namespace s2
}  // namespace galileo

#endif  // GALILEO_MANIFOLD_S2_HPP
