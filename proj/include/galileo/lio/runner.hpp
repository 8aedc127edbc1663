#ifndef GALILEO_LIO_RUNNER_HPP
#define GALILEO_LIO_RUNNER_HPP

#include <span>
#include <vector>

#include "galileo/io/dataset.hpp"
#include "galileo/io/pipeline_config.hpp"

namespace galileo {

struct RunResult {
  std::vector<StampedPose> trajectory;
  std::vector<FrameReport> reports;
  FilterState final_state;
  StaticInitResult init;
  bool covariance_valid_throughout = true;
};

/// Static initialization on the leading IMU window; the world frame starts at
/// the body origin with zero yaw.
inline FilterState initial_state(const io::Dataset& ds, const io::RunConfig& cfg, StaticInitResult* init_out) {
  if (ds.imu.empty() || ds.scans.empty()) throw DomainError("run: dataset has no IMU data or no scans");
  const double t0 = ds.imu.front().stamp;
  std::size_t n = 0;
  while (n < ds.imu.size() && ds.imu[n].stamp <= t0 + cfg.init_duration + 1e-9) ++n;
  const StaticInitResult init =
      static_initialize(std::span<const ImuSample>(ds.imu.data(), n), cfg.init);
  if (init_out) *init_out = init;
  FilterState fs;
  const double start = std::min(ds.scans.front().start_stamp, t0);
  fs.nominal.gamma = GalileanFrame(init.attitude, Vec3::Zero(), Vec3::Zero(), start);
  fs.nominal.extrinsic = ds.extrinsic;
  fs.nominal.gyro_bias = init.gyro_bias;
  fs.nominal.accel_bias = init.accel_bias;
  fs.nominal.gravity = init.gravity;
  fs.covariance = initial_covariance(cfg.uncertainty);
  fs.stamp = start;
  return fs;
}

/// Feeds IMU up to each scan end, then processes the scan.
inline RunResult run_pipeline(const io::Dataset& ds, const io::RunConfig& cfg) {
  RunResult out;
  LioOdometry odo(cfg.pipeline, initial_state(ds, cfg, &out.init));
  out.trajectory.push_back({odo.state().stamp, sgal3::project_se3(odo.state().nominal.gamma)});
  std::size_t next_imu = 0;
  for (const LidarScan& scan : ds.scans) {
    // one sample past the scan end so the midpoint input can interpolate
    while (next_imu < ds.imu.size() &&
           (next_imu == 0 || ds.imu[next_imu - 1].stamp <= scan.end_stamp())) {
      odo.add_imu(ds.imu[next_imu++]);
    }
    out.reports.push_back(odo.process_scan(scan));
    if (!covariance_is_valid(odo.state().covariance, 1e-8, 1e-8)) out.covariance_valid_throughout = false;
  }
  const auto& tr = odo.trajectory();
  out.trajectory.insert(out.trajectory.end(), tr.begin(), tr.end());
  out.final_state = odo.state();
  return out;
}

/// IMU-only propagation through the same pipeline (no updates, no map).
inline RunResult run_dead_reckoning(const io::Dataset& ds, io::RunConfig cfg) {
  cfg.pipeline.update_enabled = false;
  cfg.pipeline.map_insert_enabled = false;
  return run_pipeline(ds, cfg);
}

}  // namespace galileo

#endif  // GALILEO_LIO_RUNNER_HPP
