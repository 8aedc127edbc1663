#ifndef GALILEO_LIO_ODOMETRY_HPP
#define GALILEO_LIO_ODOMETRY_HPP

#include <chrono>
#include <deque>
#include <vector>

#include "galileo/filter/ieskf.hpp"
#include "galileo/lio/initializer.hpp"
#include "galileo/lio/plane.hpp"
#include "galileo/lio/scan.hpp"
#include "galileo/map/ioctree.hpp"

namespace galileo {

struct PipelineConfig {
  NoiseParams noise;
  ResidualParams residuals;
  UpdateOptions update;
  OctreeParams map{512.0, 4, 0.1};
  Propagation propagation = Propagation::Galilean;
  double voxel_leaf = 0.5;      // m
  double max_imu_gap = 0.05;    // s
  double map_min_spacing = 0.25;  // m; a point closer than this to the map is not inserted (0 inserts all)
  bool insert_on_degenerate = true;
  bool update_enabled = true;   // false gives dead reckoning through the same pipeline
  bool map_insert_enabled = true;

  void validate() const {
    noise.validate();
    residuals.plane.validate();
    map.validate();
    if (!(voxel_leaf > 0.0) || !(max_imu_gap > 0.0) || !(map_min_spacing >= 0.0) || !(residuals.sigma_lidar > 0.0)) {
      throw InvariantError("PipelineConfig: leaf, gap and sigma must be positive");
    }
  }
};

struct FrameReport {
  double stamp = 0.0;  // scan end
  double predict_us = 0.0;
  double deskew_us = 0.0;
  double downsample_us = 0.0;
  double update_us = 0.0;
  double insert_us = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
  bool imu_gap = false;
  std::size_t points = 0;
  std::size_t dropped = 0;
  std::size_t downsampled = 0;
  std::size_t valid = 0;
  double valid_ratio = 0.0;
  std::size_t inserted = 0;
  std::size_t map_size = 0;
  std::size_t map_bytes = 0;  // memory estimate of the map
  DegeneracyReport degeneracy;
};

struct StampedPose {
  double stamp = 0.0;
  Pose3 pose;
};

/// IMU-driven prediction, deskew, downsample, iterated update and map
/// insertion, one scan at a time.
class LioOdometry {
 public:
  LioOdometry(const PipelineConfig& config, const FilterState& initial)
      : config_(config), fs_(initial), map_(config.map) {
    config_.validate();
    if (!covariance_is_valid(fs_.covariance)) throw InvariantError("LioOdometry: bad initial covariance");
  }

  /// Samples must arrive in stamp order.
  void add_imu(const ImuSample& s) {
    if (!imu_.empty() && !(s.stamp > imu_.back().stamp)) {
      throw InvariantError("LioOdometry: IMU stamps must increase");
    }
    imu_.push_back(s);
  }

  FrameReport process_scan(const LidarScan& scan) {
    using Clock = std::chrono::steady_clock;
    auto us = [](Clock::time_point a, Clock::time_point b) {
      return std::chrono::duration<double, std::micro>(b - a).count();
    };
    scan.validate();
    FrameReport rep;
    rep.stamp = scan.end_stamp();
    rep.points = scan.points.size();

    auto t0 = Clock::now();
    if (fs_.stamp < scan.start_stamp) rep.imu_gap |= predict_to(scan.start_stamp, nullptr);
    window_.clear();
    window_.push(fs_.stamp, fs_.nominal.gamma);
    rep.imu_gap |= predict_to(scan.end_stamp(), &window_);
    auto t1 = Clock::now();
    rep.predict_us = us(t0, t1);

    const DeskewResult ds = deskew(scan, window_, fs_.nominal.extrinsic);
    rep.dropped = ds.dropped;
    // residuals are formed in the LiDAR frame at scan end
    const Pose3 lidar_from_body = fs_.nominal.extrinsic.inverse();
    std::vector<Vec3> lidar_pts;
    lidar_pts.reserve(ds.points.size());
    for (const Vec3& p : ds.points) lidar_pts.push_back(lidar_from_body * p);
    auto t2 = Clock::now();
    rep.deskew_us = us(t1, t2);

    const std::vector<Vec3> cloud = voxel_downsample(lidar_pts, config_.voxel_leaf);
    rep.downsampled = cloud.size();
    auto t3 = Clock::now();
    rep.downsample_us = us(t2, t3);

    bool insert = config_.map_insert_enabled;
    if (map_.size() == 0) {
      rep.degenerate = true;  // bootstrap: nothing to register against
    } else if (config_.update_enabled) {
      const ResidualProvider provider = [&](const NavState& x) {
        return build_residuals(x, cloud, map_, config_.residuals);
      };
      UpdateResult res = iterated_update(fs_, provider, config_.update);
      rep.iterations = res.iterations;
      rep.converged = res.converged;
      rep.degenerate = res.degenerate;
      rep.valid = static_cast<std::size_t>(res.last_batch.rows());
      rep.valid_ratio = cloud.empty() ? 0.0 : double(rep.valid) / double(cloud.size());
      rep.degeneracy = analyze_degeneracy(res.last_batch, res.state.nominal.rotation());
      fs_ = res.state;
      if (res.degenerate && !config_.insert_on_degenerate) insert = false;
    }
    auto t4 = Clock::now();
    rep.update_us = us(t3, t4);

    if (insert) {
      const Pose3 world_from_lidar = sgal3::project_se3(fs_.nominal.gamma) * fs_.nominal.extrinsic;
      std::vector<Vec3> world;
      world.reserve(cloud.size());
      for (const Vec3& p : cloud) {
        const Vec3 w = world_from_lidar * p;
        if (config_.map_min_spacing > 0.0 && map_.size() > 0) {
          const auto nn = map_.knn(w, 1);
          if (!nn.empty() && nn[0].dist2 < config_.map_min_spacing * config_.map_min_spacing) continue;
        }
        world.push_back(w);
      }
      rep.inserted = map_.insert(world).inserted;
    }
    rep.map_size = map_.size();
    rep.map_bytes = map_.stats().memory_bytes;
    rep.insert_us = us(t4, Clock::now());

    if (!fs_.nominal.gamma.position.allFinite() || !fs_.covariance.allFinite()) {
      throw DivergenceError("LioOdometry: state is not finite");
    }
    trajectory_.push_back({fs_.stamp, sgal3::project_se3(fs_.nominal.gamma)});
    return rep;
  }

  /// Known map (e.g. surveyed); combine with map_insert_enabled = false to keep it fixed.
  InsertReport preload_map(const std::vector<Vec3>& world_points) { return map_.insert(world_points); }

  const FilterState& state() const { return fs_; }
  const IOctree& map() const { return map_; }
  const PipelineConfig& config() const { return config_; }
  const PoseWindow& window() const { return window_; }
  const std::vector<StampedPose>& trajectory() const { return trajectory_; }

 private:
  // Linear interpolation of the IMU stream; clamps past either end.
  ImuSample imu_at(double t) const {
    auto it = std::lower_bound(imu_.begin(), imu_.end(), t,
                               [](const ImuSample& s, double v) { return s.stamp < v; });
    if (it == imu_.begin()) return *it;
    if (it == imu_.end()) return imu_.back();
    const ImuSample& b = *it;
    const ImuSample& a = *(it - 1);
    const double s = (t - a.stamp) / (b.stamp - a.stamp);
    ImuSample out;
    out.stamp = t;
    out.gyro = a.gyro + s * (b.gyro - a.gyro);
    out.accel = a.accel + s * (b.accel - a.accel);
    return out;
  }

  // Steps break at every IMU stamp and at `t_end`; each uses the input at the
  // step midpoint (the average of the two samples for a full interval).
  // Returns true if an IMU gap or a missing tail was bridged.
  bool predict_to(double t_end, PoseWindow* window) {
    if (imu_.empty()) throw DomainError("LioOdometry: no IMU data");
    bool gap = false;
    if (imu_.back().stamp < t_end - 1e-9) gap = true;
    while (fs_.stamp < t_end - 1e-12) {
      auto it = std::upper_bound(imu_.begin(), imu_.end(), fs_.stamp + 1e-12,
                                 [](double v, const ImuSample& s) { return v < s.stamp; });
      double next = it == imu_.end() ? t_end : std::min(it->stamp, t_end);
      if (it != imu_.end() && it != imu_.begin() && it->stamp - (it - 1)->stamp > config_.max_imu_gap) gap = true;
      next = std::min(next, fs_.stamp + kMaxPredictStep);
      const double dt = next - fs_.stamp;
      const ImuSample u = imu_at(0.5 * (fs_.stamp + next));
      const double target = next;
      fs_ = predict(fs_, u, dt, config_.noise, config_.propagation);
      fs_.stamp = target;
      if (window) window->push(fs_.stamp, fs_.nominal.gamma);
    }
    while (imu_.size() > 2 && imu_[1].stamp < fs_.stamp - 1.0) imu_.pop_front();
    return gap;
  }

  PipelineConfig config_;
  FilterState fs_;
  IOctree map_;
  std::deque<ImuSample> imu_;
  PoseWindow window_;
  std::vector<StampedPose> trajectory_;
};

}  // namespace galileo

#endif  // GALILEO_LIO_ODOMETRY_HPP
