#ifndef GALILEO_LIE_SGAL3_HPP
#define GALILEO_LIE_SGAL3_HPP

#include <cmath>

#include "galileo/lie/numeric_jacobian.hpp"
#include "galileo/lie/se3.hpp"

namespace galileo {

using Mat5 = Eigen::Matrix<double, 5, 5>;

/// Element of the special Galilean group SGal(3):
///
///   | R  v  p |
///   | 0  1  t |
///   | 0  0  1 |
///
/// Composition acts on space and time jointly, so a right increment with a
/// time entry dt advances position by the current velocity times dt.
struct GalileanFrame {
  Rot3 rotation;
  Vec3 velocity = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  double time = 0.0;

  GalileanFrame() = default;
  GalileanFrame(const Rot3& r, const Vec3& v, const Vec3& p, double t)
      : rotation(r), velocity(v), position(p), time(t) {}

  GalileanFrame operator*(const GalileanFrame& b) const {
    const Mat3& ra = rotation.matrix();
    return {rotation * b.rotation, ra * b.velocity + velocity,
            ra * b.position + velocity * b.time + position, time + b.time};
  }

  GalileanFrame inverse() const {
    const Rot3 rt = rotation.inverse();
    return {rt, -(rt * velocity), -(rt * (position - velocity * time)), -time};
  }

  Mat5 matrix() const {
    Mat5 m = Mat5::Identity();
    m.topLeftCorner<3, 3>() = rotation.matrix();
    m.block<3, 1>(0, 3) = velocity;
    m.block<3, 1>(0, 4) = position;
    m(3, 4) = time;
    return m;
  }
};

/// Tangent vector of SGal(3), ordered (rho, nu, theta, iota).
using GalTangent = Vec10;

namespace sgal3 {

inline constexpr int kRho = 0;
inline constexpr int kNu = 3;
inline constexpr int kTheta = 6;
inline constexpr int kIota = 9;
inline constexpr int kDim = 10;

// Log refuses rotations closer than this to the cut locus.
inline constexpr double kLogDomainMargin = 1e-6;

inline GalTangent tangent(const Vec3& rho, const Vec3& nu, const Vec3& theta, double iota) {
  GalTangent tau;
  tau << rho, nu, theta, iota;
  return tau;
}

inline Vec3 rho(const GalTangent& tau) { return tau.segment<3>(kRho); }
inline Vec3 nu(const GalTangent& tau) { return tau.segment<3>(kNu); }
inline Vec3 theta(const GalTangent& tau) { return tau.segment<3>(kTheta); }
inline double iota(const GalTangent& tau) { return tau[kIota]; }

/// Lie-algebra matrix. The (3,3) and (4,4) entries are zero so exp lands in the group.
inline Mat5 wedge(const GalTangent& tau) {
  Mat5 m = Mat5::Zero();
  m.topLeftCorner<3, 3>() = skew(theta(tau));
  m.block<3, 1>(0, 3) = nu(tau);
  m.block<3, 1>(0, 4) = rho(tau);
  m(3, 4) = iota(tau);
  return m;
}

inline GalTangent vee(const Mat5& m) {
  return tangent(m.block<3, 1>(0, 4), m.block<3, 1>(0, 3),
                 galileo::vee(m.topLeftCorner<3, 3>()), m(3, 4));
}

/// D(theta) = sum_n W^n / (n+2)!, the coupling of nu into p through iota.
inline Mat3 time_coupling(const Vec3& th) {
  const double phi = th.norm();
  const Mat3 w = skew(th);
  return 0.5 * Mat3::Identity() + so3::detail::phi_minus_sin_over_cube(phi) * w +
         so3::detail::cos_remainder_over_quartic(phi) * w * w;
}

inline GalileanFrame exp(const GalTangent& tau) {
  const Vec3 th = theta(tau);
  const Mat3 v_mat = so3::left_jacobian(th);
  const double dt = iota(tau);
  return {so3::exp(th), v_mat * nu(tau),
          v_mat * rho(tau) + time_coupling(th) * nu(tau) * dt, dt};
}

/// Principal logarithm; throws DomainError when ||theta|| >= pi - 1e-6.
inline GalTangent log(const GalileanFrame& g) {
  const Vec3 th = so3::log(g.rotation);
  if (th.norm() >= kPi - kLogDomainMargin) {
    throw DomainError("sgal3::log: rotation angle outside the principal domain");
  }
  const Mat3 v_inv = so3::left_jacobian_inverse(th);
  const Vec3 n = v_inv * g.velocity;
  const Vec3 r = v_inv * (g.position - time_coupling(th) * n * g.time);
  return tangent(r, n, th, g.time);
}

/// Adj_g with g Exp(tau) = Exp(Adj_g tau) g.
inline Mat10 adjoint(const GalileanFrame& g) {
  const Mat3& r = g.rotation.matrix();
  Mat10 adj = Mat10::Zero();
  adj.block<3, 3>(kRho, kRho) = r;
  adj.block<3, 3>(kRho, kNu) = -g.time * r;
  adj.block<3, 3>(kRho, kTheta) = skew(g.position - g.velocity * g.time) * r;
  adj.block<3, 1>(kRho, kIota) = g.velocity;
  adj.block<3, 3>(kNu, kNu) = r;
  adj.block<3, 3>(kNu, kTheta) = skew(g.velocity) * r;
  adj.block<3, 3>(kTheta, kTheta) = r;
  adj(kIota, kIota) = 1.0;
  return adj;
}

/// ad_tau with [tau^, xi^] = (ad_tau xi)^.
inline Mat10 small_adjoint(const GalTangent& tau) {
  Mat10 ad = Mat10::Zero();
  const Mat3 w = skew(theta(tau));
  ad.block<3, 3>(kRho, kRho) = w;
  ad.block<3, 3>(kRho, kNu) = -iota(tau) * Mat3::Identity();
  ad.block<3, 3>(kRho, kTheta) = skew(rho(tau));
  ad.block<3, 1>(kRho, kIota) = nu(tau);
  ad.block<3, 3>(kNu, kNu) = w;
  ad.block<3, 3>(kNu, kTheta) = skew(nu(tau));
  ad.block<3, 3>(kTheta, kTheta) = w;
  return ad;
}

enum class JacobianMethod {
  Numeric,  // central differences, h = 1e-6
  Series,   // sum_k (-ad)^k / (k+1)!, accurate for moderate ||ad||
};

inline Mat10 right_jacobian(const GalTangent& tau, JacobianMethod method = JacobianMethod::Numeric) {
  if (method == JacobianMethod::Series) {
    const Mat10 neg_ad = -small_adjoint(tau);
    Mat10 term = Mat10::Identity();
    Mat10 sum = Mat10::Identity();
    for (int k = 1; k < 60; ++k) {
      term = term * neg_ad / double(k + 1);
      sum += term;
      if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    return sum;
  }
  return numeric_right_jacobian<kDim>(
      tau, [](const GalTangent& t) { return exp(t); },
      [](const GalileanFrame& g) { return log(g); });
}

/// Throws ConditioningError near the principal-domain boundary.
inline Mat10 right_jacobian_inverse(const GalTangent& tau,
                                    JacobianMethod method = JacobianMethod::Numeric) {
  return checked_inverse<kDim>(right_jacobian(tau, method));
}

/// SE(3) part of the frame; velocity and time are dropped.
inline Pose3 project_se3(const GalileanFrame& g) { return {g.rotation, g.position}; }

}  // namespace sgal3

inline GalileanFrame oplus(const GalileanFrame& x, const GalTangent& tau) {
  return x * sgal3::exp(tau);
}
inline GalTangent ominus(const GalileanFrame& y, const GalileanFrame& x) {
  return sgal3::log(x.inverse() * y);
}

}  // namespace galileo

#endif  // GALILEO_LIE_SGAL3_HPP
