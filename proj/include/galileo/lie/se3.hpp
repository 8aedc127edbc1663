#ifndef GALILEO_LIE_SE3_HPP
#define GALILEO_LIE_SE3_HPP

#include "galileo/lie/numeric_jacobian.hpp"
#include "galileo/lie/so3.hpp"

namespace galileo {

/// Rigid transform. Tangent ordering is (rho, theta).
struct Pose3 {
  Rot3 rotation;
  Vec3 translation = Vec3::Zero();

  Pose3() = default;
  Pose3(const Rot3& r, const Vec3& t) : rotation(r), translation(t) {}

  Pose3 operator*(const Pose3& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }
  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  Pose3 inverse() const {
    const Rot3 rt = rotation.inverse();
    return {rt, -(rt * translation)};
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation.matrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

namespace se3 {

inline Pose3 exp(const Vec6& tau) {
  const Vec3 rho = tau.head<3>();
  const Vec3 theta = tau.tail<3>();
  return {so3::exp(theta), so3::left_jacobian(theta) * rho};
}

inline Vec6 log(const Pose3& t) {
  const Vec3 theta = so3::log(t.rotation);
  Vec6 tau;
  tau.head<3>() = so3::left_jacobian_inverse(theta) * t.translation;
  tau.tail<3>() = theta;
  return tau;
}

inline Mat6 right_jacobian(const Vec6& tau) {
  return numeric_right_jacobian<6>(
      tau, [](const Vec6& t) { return exp(t); }, [](const Pose3& p) { return log(p); });
}

inline Mat6 right_jacobian_inverse(const Vec6& tau) { return checked_inverse<6>(right_jacobian(tau)); }

}  // namespace se3

inline Pose3 oplus(const Pose3& x, const Vec6& tau) { return x * se3::exp(tau); }
inline Vec6 ominus(const Pose3& y, const Pose3& x) { return se3::log(x.inverse() * y); }

}  // namespace galileo

#endif  // GALILEO_LIE_SE3_HPP
