#ifndef GALILEO_EVAL_METRICS_HPP
#define GALILEO_EVAL_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "galileo/lio/odometry.hpp"

namespace galileo::eval {

enum class Alignment {
  None,       // compare raw positions
  FirstPose,  // map the estimate so its first common pose equals the truth's
};

/// Pose at t by linear position and slerp rotation; requires t within the range.
inline Pose3 interpolate_pose(const std::vector<StampedPose>& traj, double t) {
  auto it = std::lower_bound(traj.begin(), traj.end(), t,
                             [](const StampedPose& p, double v) { return p.stamp < v; });
  if (it == traj.end()) return traj.back().pose;
  if (it == traj.begin() || it->stamp == t) return it->pose;
  const StampedPose& b = *it;
  const StampedPose& a = *(it - 1);
  const double s = (t - a.stamp) / (b.stamp - a.stamp);
  const Eigen::Quaterniond q = a.pose.rotation.quaternion().slerp(s, b.pose.rotation.quaternion());
  return Pose3(Rot3::from_quaternion(q), a.pose.translation + s * (b.pose.translation - a.pose.translation));
}

struct PositionErrors {
  std::vector<double> stamps;
  std::vector<Vec3> errors;  // estimate - truth, truth world frame
};

/// Estimate positions interpolated at every truth stamp inside the estimate's span.
inline PositionErrors position_errors(const std::vector<StampedPose>& estimate,
                                      const std::vector<StampedPose>& truth, Alignment align = Alignment::None) {
  if (estimate.empty() || truth.empty()) throw DomainError("position_errors: empty trajectory");
  const double lo = estimate.front().stamp, hi = estimate.back().stamp;
  PositionErrors out;
  Pose3 correction;
  bool first = true;
  for (const StampedPose& gt : truth) {
    if (gt.stamp < lo || gt.stamp > hi) continue;
    const Pose3 est = interpolate_pose(estimate, gt.stamp);
    if (first) {
      if (align == Alignment::FirstPose) correction = gt.pose * est.inverse();
      first = false;
    }
    out.stamps.push_back(gt.stamp);
    out.errors.push_back((correction * est).translation - gt.pose.translation);
  }
  if (out.errors.empty()) throw DomainError("position_errors: trajectories do not overlap in time");
  return out;
}

inline double rmse(const std::vector<Vec3>& errors) {
  double sum = 0.0;
  for (const Vec3& e : errors) sum += e.squaredNorm();
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

/// RMS of one world axis of the error.
inline double axis_rmse(const std::vector<Vec3>& errors, int axis) {
  double sum = 0.0;
  for (const Vec3& e : errors) sum += e[axis] * e[axis];
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

/// RMSE of the position error; truth stamps define the samples.
inline double ape_rmse(const std::vector<StampedPose>& estimate, const std::vector<StampedPose>& truth,
                       Alignment align = Alignment::None) {
  return rmse(position_errors(estimate, truth, align).errors);
}

/// || (p_est_end - p_est_start) - (p_gt_end - p_gt_start) || over the common span.
inline double end_to_end_drift(const std::vector<StampedPose>& estimate, const std::vector<StampedPose>& truth,
                               Alignment align = Alignment::None) {
  const PositionErrors pe = position_errors(estimate, truth, align);
  return (pe.errors.back() - pe.errors.front()).norm();
}

}  // namespace galileo::eval

#endif  // GALILEO_EVAL_METRICS_HPP
