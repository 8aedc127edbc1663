#ifndef GALILEO_SIM_TRAJECTORY_HPP
#define GALILEO_SIM_TRAJECTORY_HPP

#include <string>
#include <vector>

#include "galileo/lie/sgal3.hpp"

namespace galileo::sim {

enum class ProfileKind { Static, ConstantVelocity, FigureEight, CorridorTransit };

inline ProfileKind parse_profile(const std::string& s) {
  if (s == "static") return ProfileKind::Static;
  if (s == "constant-velocity") return ProfileKind::ConstantVelocity;
  if (s == "figure-eight") return ProfileKind::FigureEight;
  if (s == "corridor-transit") return ProfileKind::CorridorTransit;
  throw DomainError("unknown profile '" + s + "'");
}

inline std::string profile_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::Static: return "static";
    case ProfileKind::ConstantVelocity: return "constant-velocity";
    case ProfileKind::FigureEight: return "figure-eight";
    case ProfileKind::CorridorTransit: return "corridor-transit";
  }
  return "?";
}

struct TrajectoryProfile {
  ProfileKind kind = ProfileKind::Static;
  double duration = 10.0;  // s
  double speed = 1.0;      // m/s; along-track for corridor and constant-velocity
  double hold = 0.0;       // stationary lead-in, s
  double ramp = 0.0;       // smooth acceleration phase after the hold, s
  Vec3 origin = Vec3::Zero();
  Vec3 attitude = Vec3::Zero();  // roll, pitch, yaw offsets, rad

  // figure-eight
  double period = 20.0;
  Vec3 amplitude = Vec3(8.0, 4.0, 0.5);
  // angular-rate profile: roll, pitch, yaw oscillation amplitudes (rad)
  Vec3 angular_amplitude = Vec3(0.08, 0.06, 0.9);

  // corridor
  double weave_amplitude = 0.5;
  double weave_period = 12.0;

  static TrajectoryProfile defaults(ProfileKind kind) {
    TrajectoryProfile p;
    p.kind = kind;
    switch (kind) {
      case ProfileKind::Static:
        break;
      case ProfileKind::ConstantVelocity:
        break;
      case ProfileKind::FigureEight:
        p.duration = 60.0;
        p.hold = 1.0;
        p.ramp = 2.0;
        p.origin = Vec3(0, 0, 0.5);
        break;
      case ProfileKind::CorridorTransit:
        p.duration = 30.0;
        p.speed = 2.0;
        p.hold = 1.0;
        p.ramp = 2.0;
        p.angular_amplitude = Vec3(0.05, 0.04, 0.15);
        break;
    }
    return p;
  }
};

/// Ground truth at one instant. The frame is the IMU body in the world.
struct KinematicState {
  double t = 0.0;
  Rot3 rotation;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 accel_world = Vec3::Zero();  // d v / dt, gravity excluded
  Vec3 omega_body = Vec3::Zero();

  GalileanFrame frame() const { return {rotation, velocity, position, t}; }
};

/// Analytic trajectory c(s) behind a time warp s(t): stationary for `hold`,
/// then an acceleration ramp with continuous jerk, then s' = 1.
class Trajectory {
 public:
  // Bounds used to reject physically implausible profiles.
  static constexpr double kMaxRate = 10.0;   // rad/s
  static constexpr double kMaxAccel = 50.0;  // m/s^2

  explicit Trajectory(const TrajectoryProfile& p) : p_(p) {
    if (!(p.duration > 0.0) || p.hold < 0.0 || p.ramp < 0.0 || !(p.period > 0.0) ||
        !(p.weave_period > 0.0)) {
      throw DomainError("Trajectory: durations and periods must be positive");
    }
    for (double t = 0.0; t <= p.duration; t += 0.01) {
      const KinematicState k = at(t);
      if (k.omega_body.norm() > kMaxRate || k.accel_world.norm() > kMaxAccel) {
        throw DomainError("Trajectory: profile exceeds rate bounds");
      }
    }
  }

  const TrajectoryProfile& profile() const { return p_; }
  double duration() const { return p_.duration; }

  KinematicState at(double t) const {
    const Warp w = warp(t);
    Curve c = curve(w.s);
    KinematicState k;
    k.t = t;
    const Mat3 r = euler_matrix(c.euler);
    k.rotation = Rot3::unchecked(r);
    k.position = c.p;
    k.velocity = c.dp * w.ds;
    k.accel_world = c.ddp * w.ds * w.ds + c.dp * w.dds;
    k.omega_body = r.transpose() * euler_rate_to_world(c.euler, c.deuler) * w.ds;
    return k;
  }

  /// Samples at `rate` Hz on [0, duration].
  std::vector<KinematicState> sample(double rate) const {
    const auto n = static_cast<long>(std::floor(p_.duration * rate + 1e-9));
    std::vector<KinematicState> out;
    out.reserve(n + 1);
    for (long i = 0; i <= n; ++i) out.push_back(at(static_cast<double>(i) / rate));
    return out;
  }

 private:
  struct Warp {
    double s, ds, dds;
  };
  struct Curve {
    Vec3 p, dp, ddp;
    Vec3 euler, deuler;  // roll, pitch, yaw and d/ds
  };

  // g(u) = 2.5u^4 - 3u^5 + u^6 has g' = quintic smoothstep, so s' ramps 0 -> 1.
  Warp warp(double t) const {
    if (t <= p_.hold) return {0.0, 0.0, 0.0};
    const double l = p_.ramp;
    if (l > 0.0 && t < p_.hold + l) {
      const double u = (t - p_.hold) / l;
      const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
      return {l * (2.5 * u4 - 3.0 * u4 * u + u4 * u2), 10.0 * u3 - 15.0 * u4 + 6.0 * u4 * u,
              (30.0 * u2 - 60.0 * u3 + 30.0 * u4) / l};
    }
    return {0.5 * l + (t - p_.hold - l), 1.0, 0.0};
  }

  Curve curve(double s) const {
    Curve c;
    c.euler = p_.attitude;
    c.deuler.setZero();
    c.dp.setZero();
    c.ddp.setZero();
    c.p = p_.origin;
    switch (p_.kind) {
      case ProfileKind::Static:
        break;
      case ProfileKind::ConstantVelocity:
        c.p += Vec3(p_.speed, 0, 0) * s;
        c.dp = Vec3(p_.speed, 0, 0);
        break;
      case ProfileKind::FigureEight: {
        const double om = 2 * kPi / p_.period;
        const Vec3& a = p_.amplitude;
        const double s1 = std::sin(om * s), c1 = std::cos(om * s);
        const double s2 = std::sin(2 * om * s), c2 = std::cos(2 * om * s);
        c.p += Vec3(a.x() * s1, a.y() * s2, a.z() * s1);
        c.dp = Vec3(a.x() * om * c1, 2 * a.y() * om * c2, a.z() * om * c1);
        c.ddp = Vec3(-a.x() * om * om * s1, -4 * a.y() * om * om * s2, -a.z() * om * om * s1);
        const Vec3& q = p_.angular_amplitude;
        c.euler += Vec3(q.x() * s2, q.y() * std::sin(om * s + 0.5), q.z() * s1);
        c.deuler = Vec3(2 * om * q.x() * c2, om * q.y() * std::cos(om * s + 0.5), om * q.z() * c1);
        break;
      }
      case ProfileKind::CorridorTransit: {
        const double om = 2 * kPi / p_.weave_period;
        const double sw = std::sin(om * s), cw = std::cos(om * s);
        const double sz = std::sin(0.5 * om * s), cz = std::cos(0.5 * om * s);
        const double wa = p_.weave_amplitude;
        c.p += Vec3(p_.speed * s, wa * sw, 0.3 * wa * sz);
        c.dp = Vec3(p_.speed, wa * om * cw, 0.15 * wa * om * cz);
        c.ddp = Vec3(0, -wa * om * om * sw, -0.075 * wa * om * om * sz);
        const Vec3& q = p_.angular_amplitude;
        c.euler += Vec3(q.x() * sz, q.y() * sw, q.z() * cw);
        c.deuler = Vec3(0.5 * om * q.x() * cz, om * q.y() * cw, -om * q.z() * sw);
        break;
      }
    }
    return c;
  }

  // R = Rz(yaw) Ry(pitch) Rx(roll)
  static Mat3 euler_matrix(const Vec3& e) {
    return (Eigen::AngleAxisd(e.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(e.y(), Vec3::UnitY()) *
            Eigen::AngleAxisd(e.x(), Vec3::UnitX()))
        .toRotationMatrix();
  }

  static Vec3 euler_rate_to_world(const Vec3& e, const Vec3& de) {
    const Mat3 rz = Eigen::AngleAxisd(e.z(), Vec3::UnitZ()).toRotationMatrix();
    const Mat3 ry = Eigen::AngleAxisd(e.y(), Vec3::UnitY()).toRotationMatrix();
    return de.z() * Vec3::UnitZ() + de.y() * (rz * Vec3::UnitY()) + de.x() * (rz * ry * Vec3::UnitX());
  }

  TrajectoryProfile p_;
};

}  // namespace galileo::sim

#endif  // GALILEO_SIM_TRAJECTORY_HPP
