#ifndef GALILEO_STATE_NAV_STATE_HPP
#define GALILEO_STATE_NAV_STATE_HPP

#include "galileo/lie/se3.hpp"
#include "galileo/lie/sgal3.hpp"
#include "galileo/manifold/s2.hpp"

namespace galileo {

/// Block layout of the 24-dim error state:
///   [0,10)  Galilean frame (rho, nu, theta, iota)
///   [10,16) IMU-to-LiDAR extrinsic (rho, theta)
///   [16,19) gyro bias, [19,22) accel bias
///   [22,24) gravity chart increment
namespace idx {
inline constexpr int kGamma = 0;
inline constexpr int kRho = 0;
inline constexpr int kNu = 3;
inline constexpr int kTheta = 6;
inline constexpr int kIota = 9;
inline constexpr int kExtrinsic = 10;
inline constexpr int kExtRho = 10;
inline constexpr int kExtTheta = 13;
inline constexpr int kGyroBias = 16;
inline constexpr int kAccelBias = 19;
inline constexpr int kGravity = 22;
inline constexpr int kDim = 24;
}  // namespace idx

/// Process noise w = (n_gyro, n_accel, n_gyro_walk, n_accel_walk).
namespace noise_idx {
inline constexpr int kGyro = 0;
inline constexpr int kAccel = 3;
inline constexpr int kGyroWalk = 6;
inline constexpr int kAccelWalk = 9;
inline constexpr int kDim = 12;
}  // namespace noise_idx

using ErrorVector = Eigen::Matrix<double, idx::kDim, 1>;
using Mat24 = Eigen::Matrix<double, idx::kDim, idx::kDim>;
using NoiseVector = Eigen::Matrix<double, noise_idx::kDim, 1>;
using NoiseJacobian = Eigen::Matrix<double, idx::kDim, noise_idx::kDim>;

struct ImuSample {
  double stamp = 0.0;
  Vec3 gyro = Vec3::Zero();   // rad/s
  Vec3 accel = Vec3::Zero();  // specific force, m/s^2
};

/// Continuous-time noise densities, identical on every axis.
struct NoiseParams {
  double gyro_noise_density = 1e-3;  // rad/s/sqrt(Hz)
  double accel_noise_density = 1e-2;  // m/s^2/sqrt(Hz)
  double gyro_bias_walk = 1e-5;       // rad/s^2/sqrt(Hz)
  double accel_bias_walk = 1e-4;      // m/s^3/sqrt(Hz)

  void validate() const {
    if (gyro_noise_density < 0.0 || accel_noise_density < 0.0 || gyro_bias_walk < 0.0 ||
        accel_bias_walk < 0.0) {
      throw InvariantError("NoiseParams: densities must be nonnegative");
    }
  }
};

struct NavState {
  GalileanFrame gamma;  // world frame
  Pose3 extrinsic;      // LiDAR frame expressed in the IMU frame
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 accel_bias = Vec3::Zero();
  SpherePoint gravity;  // world frame, pointing down

  const Rot3& rotation() const { return gamma.rotation; }
  const Vec3& position() const { return gamma.position; }
  const Vec3& velocity() const { return gamma.velocity; }
};

inline NavState oplus(const NavState& x, const ErrorVector& delta) {
  NavState y = x;
  y.gamma = oplus(x.gamma, GalTangent(delta.segment<10>(idx::kGamma)));
  y.extrinsic = oplus(x.extrinsic, Vec6(delta.segment<6>(idx::kExtrinsic)));
  y.gyro_bias = x.gyro_bias + delta.segment<3>(idx::kGyroBias);
  y.accel_bias = x.accel_bias + delta.segment<3>(idx::kAccelBias);
  y.gravity = s2::oplus(x.gravity, SphereTangent(delta.segment<2>(idx::kGravity)));
  return y;
}

inline ErrorVector ominus(const NavState& y, const NavState& x) {
  ErrorVector d;
  d.segment<10>(idx::kGamma) = ominus(y.gamma, x.gamma);
  d.segment<6>(idx::kExtrinsic) = ominus(y.extrinsic, x.extrinsic);
  d.segment<3>(idx::kGyroBias) = y.gyro_bias - x.gyro_bias;
  d.segment<3>(idx::kAccelBias) = y.accel_bias - x.accel_bias;
  d.segment<2>(idx::kGravity) = s2::ominus(y.gravity, x.gravity);
  return d;
}

/// State evolution by an increment laid out like the error state. Coincides with
/// oplus on every block; the rotation is re-projected onto SO(3) so long
/// propagation chains do not drift off the group.
inline NavState boxplus(const NavState& x, const ErrorVector& increment) {
  NavState y = oplus(x, increment);
  y.gamma.rotation = y.gamma.rotation.normalized();
  return y;
}

}  // namespace galileo

#endif  // GALILEO_STATE_NAV_STATE_HPP
