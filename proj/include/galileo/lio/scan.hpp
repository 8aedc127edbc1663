#ifndef GALILEO_LIO_SCAN_HPP
#define GALILEO_LIO_SCAN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "galileo/lie/sgal3.hpp"

namespace galileo {

struct LidarPoint {
  Vec3 position = Vec3::Zero();  // LiDAR frame, m
  double offset = 0.0;           // s after scan start
  std::optional<double> intensity;
};

struct LidarScan {
  double start_stamp = 0.0;
  double period = 0.1;
  std::vector<LidarPoint> points;

  double end_stamp() const { return start_stamp + period; }

  void validate() const {
    if (!(period > 0.0) || !std::isfinite(start_stamp)) {
      throw InvariantError("LidarScan: bad stamp or period");
    }
    for (const LidarPoint& p : points) {
      if (!p.position.allFinite() || !(p.offset >= 0.0) || p.offset > period) {
        throw InvariantError("LidarScan: point offset outside [0, period] or non-finite");
      }
    }
  }
};

/// Poses recorded across one scan interval, interpolated along SGal(3) geodesics.
class PoseWindow {
 public:
  void clear() {
    stamps_.clear();
    frames_.clear();
    steps_.clear();
  }

  /// Stamps must increase strictly.
  void push(double stamp, const GalileanFrame& frame) {
    if (!stamps_.empty() && !(stamp > stamps_.back())) {
      throw InvariantError("PoseWindow: stamps must increase strictly");
    }
    if (!frames_.empty()) steps_.push_back(ominus(frame, frames_.back()));
    stamps_.push_back(stamp);
    frames_.push_back(frame);
  }

  std::size_t size() const { return stamps_.size(); }
  bool empty() const { return stamps_.empty(); }
  double front_stamp() const { return stamps_.front(); }
  double back_stamp() const { return stamps_.back(); }
  const GalileanFrame& back() const { return frames_.back(); }
  const std::vector<double>& stamps() const { return stamps_; }
  const std::vector<GalileanFrame>& frames() const { return frames_; }

  bool covers(double t0, double t1) const {
    return !empty() && stamps_.front() <= t0 && stamps_.back() >= t1;
  }

  /// Gamma_a (+) s (Gamma_b (-) Gamma_a) between the bracketing poses; empty outside the window.
  std::optional<GalileanFrame> interpolate(double t) const {
    if (empty() || t < stamps_.front() || t > stamps_.back()) return std::nullopt;
    if (t == stamps_.back()) return frames_.back();
    auto it = std::upper_bound(stamps_.begin(), stamps_.end(), t);
    std::size_t b = static_cast<std::size_t>(it - stamps_.begin());
    if (b >= stamps_.size()) b = stamps_.size() - 1;
    const std::size_t a = b - 1;
    const double s = (t - stamps_[a]) / (stamps_[b] - stamps_[a]);
    if (s == 0.0) return frames_[a];
    return oplus(frames_[a], GalTangent(s * steps_[a]));
  }

 private:
  std::vector<double> stamps_;
  std::vector<GalileanFrame> frames_;
  std::vector<GalTangent> steps_;
};

struct DeskewResult {
  std::vector<Vec3> points;  // scan-end IMU (body) frame
  std::vector<std::size_t> source;  // index into the scan
  std::size_t dropped = 0;          // stamp outside the window
};

/// Moves every point to the body frame at scan end:
///   p_end = T_end^-1 T(t) T_L p,  T(t) the interpolated pose at the point stamp.
inline DeskewResult deskew(const LidarScan& scan, const PoseWindow& window, const Pose3& extrinsic) {
  DeskewResult out;
  out.points.reserve(scan.points.size());
  out.source.reserve(scan.points.size());
  const std::optional<GalileanFrame> end = window.interpolate(scan.end_stamp());
  if (!end) {
    out.dropped = scan.points.size();
    return out;
  }
  const Pose3 end_inv = sgal3::project_se3(*end).inverse();
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const LidarPoint& lp = scan.points[i];
    const std::optional<GalileanFrame> g = window.interpolate(scan.start_stamp + lp.offset);
    if (!g) {
      ++out.dropped;
      continue;
    }
    const Pose3 rel = end_inv * sgal3::project_se3(*g);
    out.points.push_back(rel * (extrinsic * lp.position));
    out.source.push_back(i);
  }
  return out;
}

namespace detail {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 73856093ull;
    h ^= static_cast<std::uint64_t>(k.y) * 19349669ull;
    h ^= static_cast<std::uint64_t>(k.z) * 83492791ull;
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Keeps the first point (by index) of every occupied voxel floor(p / leaf).
inline std::vector<Vec3> voxel_downsample(const std::vector<Vec3>& cloud, double leaf) {
  if (!(leaf > 0.0)) throw DomainError("voxel_downsample: leaf must be positive");
  std::unordered_map<detail::VoxelKey, std::size_t, detail::VoxelKeyHash> seen;
  seen.reserve(cloud.size());
  std::vector<Vec3> out;
  for (const Vec3& p : cloud) {
    const detail::VoxelKey key{static_cast<std::int64_t>(std::floor(p.x() / leaf)),
                               static_cast<std::int64_t>(std::floor(p.y() / leaf)),
                               static_cast<std::int64_t>(std::floor(p.z() / leaf))};
    if (seen.emplace(key, out.size()).second) out.push_back(p);
  }
  return out;
}

}  // namespace galileo

#endif  // GALILEO_LIO_SCAN_HPP
