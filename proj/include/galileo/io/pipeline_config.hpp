#ifndef GALILEO_IO_PIPELINE_CONFIG_HPP
#define GALILEO_IO_PIPELINE_CONFIG_HPP

#include "galileo/io/keyvalue.hpp"
#include "galileo/lio/odometry.hpp"

namespace galileo::io {

/// Everything `run` needs besides the dataset.
struct RunConfig {
  PipelineConfig pipeline;
  StaticInitParams init;
  InitialUncertainty uncertainty;
  double init_duration = 1.0;  // s of IMU used for static initialization
};

inline Propagation parse_propagation(const std::string& s) {
  if (s == "galilean") return Propagation::Galilean;
  if (s == "decoupled") return Propagation::Decoupled;
  throw IoError("propagation: expected 'galilean' or 'decoupled', got '" + s + "'");
}

inline std::string propagation_name(Propagation p) {
  return p == Propagation::Galilean ? "galilean" : "decoupled";
}

inline RunConfig run_config_from(const KeyValueFile& kv) {
  RunConfig c;
  PipelineConfig& p = c.pipeline;
  p.noise.gyro_noise_density = kv.get_double("gyro_noise_density", p.noise.gyro_noise_density);
  p.noise.accel_noise_density = kv.get_double("accel_noise_density", p.noise.accel_noise_density);
  p.noise.gyro_bias_walk = kv.get_double("gyro_bias_walk", p.noise.gyro_bias_walk);
  p.noise.accel_bias_walk = kv.get_double("accel_bias_walk", p.noise.accel_bias_walk);
  p.residuals.sigma_lidar = kv.get_double("sigma_lidar", p.residuals.sigma_lidar);
  p.residuals.max_point_residual = kv.get_double("max_point_residual", p.residuals.max_point_residual);
  p.residuals.plane.k = kv.get_int("plane_k", p.residuals.plane.k);
  p.residuals.plane.plane_tolerance = kv.get_double("plane_tolerance", p.residuals.plane.plane_tolerance);
  p.residuals.plane.max_neighbor_distance =
      kv.get_double("max_neighbor_distance", p.residuals.plane.max_neighbor_distance);
  p.residuals.plane.min_spread_ratio = kv.get_double("min_spread_ratio", p.residuals.plane.min_spread_ratio);
  p.update.max_iters = kv.get_int("max_iters", p.update.max_iters);
  p.update.eps = kv.get_double("update_eps", p.update.eps);
  p.map.initial_half_extent = kv.get_double("map_initial_half_extent", p.map.initial_half_extent);
  p.map.bucket_size = static_cast<std::size_t>(kv.get_int("map_bucket_size", static_cast<int>(p.map.bucket_size)));
  p.map.min_extent = kv.get_double("map_min_extent", p.map.min_extent);
  p.voxel_leaf = kv.get_double("voxel_leaf", p.voxel_leaf);
  p.map_min_spacing = kv.get_double("map_min_spacing", p.map_min_spacing);
  p.max_imu_gap = kv.get_double("max_imu_gap", p.max_imu_gap);
  p.insert_on_degenerate = kv.get_bool("insert_on_degenerate", p.insert_on_degenerate);
  p.propagation = parse_propagation(kv.get_string("propagation", propagation_name(p.propagation)));
  c.init_duration = kv.get_double("init_duration", c.init_duration);
  c.init.max_accel_std = kv.get_double("init_max_accel_std", c.init.max_accel_std);
  c.init.max_gyro_std = kv.get_double("init_max_gyro_std", c.init.max_gyro_std);
  c.init.gravity_magnitude = kv.get_double("gravity_magnitude", c.init.gravity_magnitude);
  InitialUncertainty& u = c.uncertainty;
  u.position = kv.get_double("init_std_position", u.position);
  u.velocity = kv.get_double("init_std_velocity", u.velocity);
  u.roll_pitch = kv.get_double("init_std_roll_pitch", u.roll_pitch);
  u.yaw = kv.get_double("init_std_yaw", u.yaw);
  u.extrinsic_translation = kv.get_double("init_std_extrinsic_translation", u.extrinsic_translation);
  u.extrinsic_rotation = kv.get_double("init_std_extrinsic_rotation", u.extrinsic_rotation);
  u.gyro_bias = kv.get_double("init_std_gyro_bias", u.gyro_bias);
  u.accel_bias = kv.get_double("init_std_accel_bias", u.accel_bias);
  u.gravity = kv.get_double("init_std_gravity", u.gravity);
  try {
    p.validate();
  } catch (const InvariantError& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  if (!(c.init_duration >= c.init.min_duration)) throw IoError("config: init_duration below the 0.5 s minimum");
  return c;
}

}  // namespace galileo::io

#endif  // GALILEO_IO_PIPELINE_CONFIG_HPP
