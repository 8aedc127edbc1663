#ifndef GALILEO_SIM_SENSORS_HPP
#define GALILEO_SIM_SENSORS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "galileo/lio/scan.hpp"
#include "galileo/sim/rng.hpp"
#include "galileo/sim/trajectory.hpp"
#include "galileo/sim/world.hpp"
#include "galileo/state/nav_state.hpp"

namespace galileo::sim {

inline Vec3 default_gravity() { return Vec3(0, 0, -SpherePoint::kDefaultRadius); }

struct ImuSimParams {
  double rate = 200.0;  // Hz
  NoiseParams noise;
  Vec3 gyro_bias = Vec3(0.002, -0.001, 0.0015);
  Vec3 accel_bias = Vec3(0.02, -0.015, 0.03);
  bool bias_random_walk = true;
  Vec3 gravity = default_gravity();

  static ImuSimParams noiseless() {
    ImuSimParams p;
    p.noise = NoiseParams{0.0, 0.0, 0.0, 0.0};
    p.gyro_bias.setZero();
    p.accel_bias.setZero();
    p.bias_random_walk = false;
    return p;
  }
};

struct ImuBias {
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

/// omega = omega_true + b_g + n_g,  a = R^T (a_world - g) + b_a + n_a.
/// White noise is the density times sqrt(rate); biases walk by walk * sqrt(dt).
inline std::vector<ImuSample> sim_imu(const std::vector<KinematicState>& truth, const ImuSimParams& params,
                                      std::uint64_t seed, std::vector<ImuBias>* biases = nullptr) {
  auto noise_gen = stream_engine(seed, Stream::Imu);
  auto bias_gen = stream_engine(seed, Stream::Bias);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto gauss3 = [&](std::mt19937_64& g) { return Vec3(n01(g), n01(g), n01(g)); };
  const double sq_rate = std::sqrt(params.rate);
  const double sq_dt = 1.0 / sq_rate;
  Vec3 bg = params.gyro_bias, ba = params.accel_bias;
  std::vector<ImuSample> out;
  out.reserve(truth.size());
  for (const KinematicState& k : truth) {
    ImuSample s;
    s.stamp = k.t;
    s.gyro = k.omega_body + bg + params.noise.gyro_noise_density * sq_rate * gauss3(noise_gen);
    s.accel = k.rotation.inverse() * (k.accel_world - params.gravity) + ba +
              params.noise.accel_noise_density * sq_rate * gauss3(noise_gen);
    out.push_back(s);
    if (biases) biases->push_back({bg, ba});
    if (params.bias_random_walk) {
      bg += params.noise.gyro_bias_walk * sq_dt * gauss3(bias_gen);
      ba += params.noise.accel_bias_walk * sq_dt * gauss3(bias_gen);
    }
  }
  return out;
}

struct LidarSimParams {
  int channels = 16;
  double fov_down = -15.0;  // deg
  double fov_up = 15.0;     // deg
  int columns = 180;
  double rate = 10.0;  // Hz
  double min_range = 0.5;
  double max_range = 60.0;
  double range_noise = 0.02;  // m

  double period() const { return 1.0 / rate; }

  void validate() const {
    if (channels < 1 || columns < 1 || !(rate > 0.0) || !(min_range >= 0.0) || !(max_range > min_range) ||
        !(range_noise >= 0.0) || !(fov_up >= fov_down)) {
      throw InvariantError("LidarSimParams: invalid sensor description");
    }
  }
};

/// World pose of the IMU body at time t.
using PoseSource = std::function<Pose3(double)>;

inline PoseSource pose_source(const Trajectory& traj) {
  return [&traj](double t) {
    const KinematicState k = traj.at(t);
    return Pose3(k.rotation, k.position);
  };
}

/// Spinning multi-beam sensor. Column c fires at offset c / columns * period
/// from the pose of that instant, so a moving platform produces skew.
inline LidarScan sim_lidar_scan(const World& world, const PoseSource& pose, const Pose3& extrinsic,
                                const LidarSimParams& params, double start, std::uint64_t seed,
                                std::uint64_t scan_index) {
  auto gen = stream_engine(seed, Stream::Lidar, scan_index);
  std::normal_distribution<double> noise(0.0, 1.0);
  LidarScan scan;
  scan.start_stamp = start;
  scan.period = params.period();
  const double deg = kPi / 180.0;
  for (int c = 0; c < params.columns; ++c) {
    const double offset = scan.period * c / params.columns;
    const Pose3 wl = pose(start + offset) * extrinsic;
    const double az = 2.0 * kPi * c / params.columns;
    for (int i = 0; i < params.channels; ++i) {
      const double el =
          params.channels == 1 ? 0.0
                               : (params.fov_down + (params.fov_up - params.fov_down) * i / (params.channels - 1)) * deg;
      const Vec3 d(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      const Vec3 dw = wl.rotation * d;
      const double eps = noise(gen);  // drawn per beam so hits and misses keep the stream aligned
      const auto hit = world.raycast(wl.translation, dw, params.min_range, params.max_range);
      if (!hit) continue;
      LidarPoint p;
      p.position = (hit->range + params.range_noise * eps) * d;
      p.offset = offset;
      p.intensity = std::abs(hit->normal.dot(dw));
      scan.points.push_back(p);
    }
  }
  return scan;
}

/// Scans start at k / rate and must end within the trajectory duration.
inline std::vector<LidarScan> sim_lidar(const World& world, const PoseSource& pose, double duration,
                                        const Pose3& extrinsic, const LidarSimParams& params, std::uint64_t seed) {
  params.validate();
  world.validate();
  std::vector<LidarScan> scans;
  const auto n = static_cast<std::uint64_t>(std::floor(duration * params.rate + 1e-9));
  for (std::uint64_t k = 0; k < n; ++k) {
    scans.push_back(sim_lidar_scan(world, pose, extrinsic, params, static_cast<double>(k) / params.rate, seed, k));
  }
  return scans;
}

}  // namespace galileo::sim

#endif  // GALILEO_SIM_SENSORS_HPP
