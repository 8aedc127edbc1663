#ifndef GALILEO_DIAGNOSTICS_JACOBIAN_AUDIT_HPP
#define GALILEO_DIAGNOSTICS_JACOBIAN_AUDIT_HPP

#include <random>
#include <string>
#include <vector>

#include "galileo/filter/ieskf.hpp"
#include "galileo/lio/plane.hpp"

namespace galileo::diagnostics {

struct AuditResult {
  std::string name;
  int configs = 0;
  double max_defect = 0.0;  // max abs entry of (analytic - finite difference)
};

namespace detail {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Vec3 vec(double s) { return Vec3(uniform(-s, s), uniform(-s, s), uniform(-s, s)); }
  Vec3 unit() {
    Vec3 v;
    do v = vec(1.0);
    while (v.norm() < 0.1 || v.norm() > 1.0);
    return v.normalized();
  }
  Vec3 rotvec(double max_angle) { return unit() * uniform(0.0, max_angle); }
  Rot3 rotation() { return so3::exp(rotvec(kPi - 1e-2)); }
  NavState state() {
    NavState x;
    x.gamma = GalileanFrame(rotation(), vec(3.0), vec(10.0), uniform(0.0, 100.0));
    x.extrinsic = Pose3(so3::exp(rotvec(0.5)), vec(0.3));
    x.gyro_bias = vec(0.02);
    x.accel_bias = vec(0.2);
    x.gravity = SpherePoint::projected(Vec3(0, 0, -1) + vec(0.3), SpherePoint::kDefaultRadius);
    return x;
  }

 private:
  std::mt19937_64 gen_;
};

template <typename A, typename B>
double max_abs(const A& a, const B& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace detail

inline constexpr double kAuditStep = 1e-6;

/// SO(3) closed-form right Jacobian.
inline AuditResult audit_so3(int n, std::uint64_t seed) {
  detail::Sampler s(seed);
  AuditResult r{"so3 right Jacobian", n, 0.0};
  for (int c = 0; c < n; ++c) {
    const Vec3 th = s.rotvec(kPi - 0.1);
    const Mat3 fd = numeric_right_jacobian<3>(
        th, [](const Vec3& t) { return so3::exp(t); }, [](const Rot3& g) { return so3::log(g); }, kAuditStep);
    r.max_defect = std::max(r.max_defect, detail::max_abs(so3::right_jacobian(th), fd));
  }
  return r;
}

/// SGal(3) right Jacobian, series evaluation against central differences.
inline AuditResult audit_sgal3(int n, std::uint64_t seed) {
  detail::Sampler s(seed);
  AuditResult r{"sgal3 right Jacobian", n, 0.0};
  for (int c = 0; c < n; ++c) {
    const GalTangent tau = sgal3::tangent(s.vec(1.0), s.vec(1.0), s.rotvec(2.0), s.uniform(-1.0, 1.0));
    const Mat10 fd = numeric_right_jacobian<10>(
        tau, [](const GalTangent& t) { return sgal3::exp(t); },
        [](const GalileanFrame& g) { return sgal3::log(g); }, 1e-5);
    r.max_defect =
        std::max(r.max_defect, detail::max_abs(sgal3::right_jacobian(tau, sgal3::JacobianMethod::Series), fd));
  }
  return r;
}

/// d(y - x)/dy on S^2 along tangent directions at y.
inline AuditResult audit_s2(int n, std::uint64_t seed) {
  detail::Sampler s(seed);
  AuditResult r{"s2 ominus Jacobian", n, 0.0};
  const double rad = SpherePoint::kDefaultRadius;
  for (int c = 0; c < n; ++c) {
    const SpherePoint x = SpherePoint::projected(s.unit(), rad);
    const SpherePoint y = s2::oplus(x, SphereTangent(s.uniform(-2.0, 2.0), s.uniform(-2.0, 2.0)));
    const Mat23 j = s2::ominus_jacobian_wrt_y(x, y);
    const Mat32 tb = s2::basis(y);  // tangent directions at y
    Mat2 fd;
    for (int k = 0; k < 2; ++k) {
      const Vec3 e = tb.col(k) * kAuditStep;
      fd.col(k) = (s2::ominus(SpherePoint::projected(y.vector() + e, rad), x) -
                   s2::ominus(SpherePoint::projected(y.vector() - e, rad), x)) /
                  (2 * kAuditStep);
    }
    r.max_defect = std::max(r.max_defect, detail::max_abs(Mat2(j * tb), fd));
  }
  return r;
}

/// Analytic F and F_w against differences of the discrete error recursion.
inline AuditResult audit_transition(int n, std::uint64_t seed) {
  detail::Sampler s(seed);
  AuditResult r{"transition Jacobians F, F_w", n, 0.0};
  for (int c = 0; c < n; ++c) {
    const NavState x = s.state();
    ImuSample u;
    u.gyro = s.vec(2.0);
    u.accel = s.vec(15.0);
    const double dt = s.uniform(0.001, 0.02);
    const TransitionJacobians a = transition_jacobians(x, u, dt);
    const TransitionJacobians fd = numeric_transition_jacobians(x, u, dt, Propagation::Galilean, kAuditStep);
    r.max_defect = std::max(r.max_defect, detail::max_abs(a.state, fd.state));
    r.max_defect = std::max(r.max_defect, detail::max_abs(a.noise, fd.noise));
  }
  return r;
}

/// Every block of the point-to-plane row against differences through the state oplus.
inline AuditResult audit_measurement(int n, std::uint64_t seed) {
  detail::Sampler s(seed);
  AuditResult r{"measurement rows H", n, 0.0};
  for (int c = 0; c < n; ++c) {
    const NavState x = s.state();
    const Vec3 p = s.vec(20.0);
    PlaneFit fit;
    fit.normal = s.unit();
    fit.point = s.vec(20.0);
    fit.valid = true;
    const PointResidual pr = point_residual(x, p, fit);
    Eigen::Matrix<double, 1, idx::kDim> fd;
    for (int i = 0; i < idx::kDim; ++i) {
      ErrorVector d = ErrorVector::Zero();
      d[i] = kAuditStep;
      fd[i] = (point_residual(oplus(x, d), p, fit).z - point_residual(oplus(x, ErrorVector(-d)), p, fit).z) /
              (2 * kAuditStep);
    }
    r.max_defect = std::max(r.max_defect, detail::max_abs(pr.h, fd));
  }
  return r;
}

inline std::vector<AuditResult> run_all_audits(int n = 100, std::uint64_t seed = 1) {
  return {audit_so3(n, seed), audit_sgal3(n, seed + 1), audit_s2(n, seed + 2), audit_transition(n, seed + 3),
          audit_measurement(n, seed + 4)};
}

}  // namespace galileo::diagnostics

#endif  // GALILEO_DIAGNOSTICS_JACOBIAN_AUDIT_HPP
