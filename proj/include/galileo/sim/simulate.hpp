#ifndef GALILEO_SIM_SIMULATE_HPP
#define GALILEO_SIM_SIMULATE_HPP

#include <string>

#include <fmt/format.h>

#include "galileo/io/dataset.hpp"
#include "galileo/sim/sensors.hpp"

namespace galileo::sim {

enum class WorldKind { BoxRoom, Corridor, SingleWall };

inline WorldKind parse_world(const std::string& s) {
  if (s == "box-room") return WorldKind::BoxRoom;
  if (s == "corridor") return WorldKind::Corridor;
  if (s == "single-wall") return WorldKind::SingleWall;
  throw DomainError("unknown world '" + s + "'");
}

inline std::string world_name(WorldKind w) {
  switch (w) {
    case WorldKind::BoxRoom: return "box-room";
    case WorldKind::Corridor: return "corridor";
    case WorldKind::SingleWall: return "single-wall";
  }
  return "?";
}

inline World make_world(WorldKind w) {
  switch (w) {
    case WorldKind::BoxRoom: return box_room();
    case WorldKind::Corridor: return corridor();
    case WorldKind::SingleWall: return single_wall();
  }
  return {};
}

inline WorldKind default_world(ProfileKind p) {
  return p == ProfileKind::CorridorTransit ? WorldKind::Corridor : WorldKind::BoxRoom;
}

inline Pose3 default_extrinsic() { return Pose3(so3::exp(Vec3(0.0, 0.0, 0.05)), Vec3(0.05, 0.02, 0.10)); }

struct SimulationSpec {
  TrajectoryProfile profile = TrajectoryProfile::defaults(ProfileKind::Static);
  WorldKind world = WorldKind::BoxRoom;
  std::uint64_t seed = 1;
  ImuSimParams imu;
  LidarSimParams lidar;
  Pose3 extrinsic = default_extrinsic();
};

struct Simulation {
  io::Dataset dataset;
  std::vector<KinematicState> truth;  // at IMU rate
  std::vector<ImuBias> biases;        // true biases at each IMU sample
};

inline Simulation simulate(const SimulationSpec& spec) {
  const Trajectory traj(spec.profile);
  const World world = make_world(spec.world);
  Simulation sim;
  sim.truth = traj.sample(spec.imu.rate);
  io::Dataset& ds = sim.dataset;
  ds.imu = sim_imu(sim.truth, spec.imu, spec.seed, &sim.biases);
  ds.scans = sim_lidar(world, pose_source(traj), traj.duration(), spec.extrinsic, spec.lidar, spec.seed);
  ds.extrinsic = spec.extrinsic;
  ds.scan_period = spec.lidar.period();
  ds.truth.reserve(sim.truth.size());
  for (const KinematicState& k : sim.truth) ds.truth.push_back({k.t, Pose3(k.rotation, k.position)});
  ds.meta.set("profile", profile_name(spec.profile.kind));
  ds.meta.set("world", world_name(spec.world));
  ds.meta.set("seed", fmt::format("{}", spec.seed));
  ds.meta.set("duration", fmt::format("{:.17g}", spec.profile.duration));
  ds.meta.set("imu_rate", fmt::format("{:.17g}", spec.imu.rate));
  ds.meta.set("lidar_rate", fmt::format("{:.17g}", spec.lidar.rate));
  ds.meta.set("range_noise", fmt::format("{:.17g}", spec.lidar.range_noise));
  ds.meta.set("gyro_noise_density", fmt::format("{:.17g}", spec.imu.noise.gyro_noise_density));
  ds.meta.set("accel_noise_density", fmt::format("{:.17g}", spec.imu.noise.accel_noise_density));
  ds.meta.set("gyro_bias_walk", fmt::format("{:.17g}", spec.imu.noise.gyro_bias_walk));
  ds.meta.set("accel_bias_walk", fmt::format("{:.17g}", spec.imu.noise.accel_bias_walk));
  return sim;
}

}  // namespace galileo::sim

#endif  // GALILEO_SIM_SIMULATE_HPP
