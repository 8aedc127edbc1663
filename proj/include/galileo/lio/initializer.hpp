#ifndef GALILEO_LIO_INITIALIZER_HPP
#define GALILEO_LIO_INITIALIZER_HPP

#include <cmath>
#include <span>

#include "galileo/filter/ieskf.hpp"

namespace galileo {

struct StaticInitParams {
  double min_duration = 0.5;        // s
  double max_accel_std = 0.2;       // m/s^2, per-axis motion gate
  double max_gyro_std = 0.05;       // rad/s
  double gravity_magnitude = SpherePoint::kDefaultRadius;
};

struct StaticInitResult {
  Rot3 attitude;  // body to world, yaw fixed to zero
  SpherePoint gravity;
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 accel_bias = Vec3::Zero();
  Vec3 mean_accel = Vec3::Zero();
  Vec3 mean_gyro = Vec3::Zero();
};

/// Gyro bias = mean gyro. The attitude is the smallest rotation taking the mean
/// specific force onto +z, so gravity is (0, 0, -r) in the world; whatever of
/// the mean specific force is left after removing -R^T g is the accel bias
/// (its magnitude mismatch only, the direction is absorbed by the attitude).
inline StaticInitResult static_initialize(std::span<const ImuSample> samples,
                                          const StaticInitParams& params = {}) {
  if (samples.size() < 2 || !(samples.back().stamp - samples.front().stamp >= params.min_duration)) {
    throw DomainError("static_initialize: need at least min_duration of IMU data");
  }
  Vec3 ma = Vec3::Zero(), mg = Vec3::Zero();
  for (const ImuSample& s : samples) {
    ma += s.accel;
    mg += s.gyro;
  }
  const double n = static_cast<double>(samples.size());
  ma /= n;
  mg /= n;
  Vec3 va = Vec3::Zero(), vg = Vec3::Zero();
  for (const ImuSample& s : samples) {
    va += (s.accel - ma).cwiseAbs2();
    vg += (s.gyro - mg).cwiseAbs2();
  }
  va /= n;
  vg /= n;
  if (va.cwiseSqrt().maxCoeff() > params.max_accel_std || vg.cwiseSqrt().maxCoeff() > params.max_gyro_std) {
    throw DomainError("static_initialize: motion detected, platform must be stationary");
  }
  if (!(ma.norm() > 1e-6)) throw DomainError("static_initialize: no specific force");

  StaticInitResult out;
  out.mean_accel = ma;
  out.mean_gyro = mg;
  out.gyro_bias = mg;
  const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(ma.normalized(), Vec3::UnitZ());
  out.attitude = Rot3::from_quaternion(q);
  const double r = params.gravity_magnitude;
  out.gravity = SpherePoint(Vec3(0, 0, -r), r);
  out.accel_bias = ma + out.attitude.inverse() * out.gravity.vector();
  return out;
}

/// Initial standard deviations per block of the error state.
struct InitialUncertainty {
  double position = 1e-3;  // m
  double velocity = 0.05;  // m/s
  double roll_pitch = 0.01;  // rad
  double yaw = 1e-3;       // rad
  double extrinsic_translation = 1e-3;  // m
  double extrinsic_rotation = 1e-3;     // rad
  double gyro_bias = 1e-3;   // rad/s
  double accel_bias = 0.05;  // m/s^2
  double gravity = 0.01;     // m/s^2 per chart axis
};

/// Diagonal covariance; the time-offset entry stays exactly zero (frozen).
inline Mat24 initial_covariance(const InitialUncertainty& u = {}) {
  ErrorVector d = ErrorVector::Zero();
  d.segment<3>(idx::kRho).setConstant(u.position * u.position);
  d.segment<3>(idx::kNu).setConstant(u.velocity * u.velocity);
  d.segment<2>(idx::kTheta).setConstant(u.roll_pitch * u.roll_pitch);
  d[idx::kTheta + 2] = u.yaw * u.yaw;
  d.segment<3>(idx::kExtRho).setConstant(u.extrinsic_translation * u.extrinsic_translation);
  d.segment<3>(idx::kExtTheta).setConstant(u.extrinsic_rotation * u.extrinsic_rotation);
  d.segment<3>(idx::kGyroBias).setConstant(u.gyro_bias * u.gyro_bias);
  d.segment<3>(idx::kAccelBias).setConstant(u.accel_bias * u.accel_bias);
  d.segment<2>(idx::kGravity).setConstant(u.gravity * u.gravity);
  return d.asDiagonal();
}

}  // namespace galileo

#endif  // GALILEO_LIO_INITIALIZER_HPP
