#ifndef GALILEO_FILTER_IESKF_HPP
#define GALILEO_FILTER_IESKF_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "galileo/state/nav_state.hpp"

namespace galileo {

struct FilterState {
  NavState nominal;
  Mat24 covariance = Mat24::Zero();
  double stamp = 0.0;
};

/// Stacked measurement: residuals z (M), Jacobian H (M x 24), diagonal noise V (M).
struct MeasurementBatch {
  Eigen::VectorXd residuals;
  Eigen::Matrix<double, Eigen::Dynamic, idx::kDim> jacobian;
  Eigen::VectorXd noise_variance;
  std::size_t candidates = 0;  // points considered before gating

  Eigen::Index rows() const { return residuals.size(); }

  void resize(Eigen::Index m) {
    residuals.resize(m);
    jacobian.resize(m, idx::kDim);
    noise_variance.resize(m);
  }
};

enum class Propagation {
  Galilean,   // Gamma + f on SGal(3), analytic transition Jacobians
  Decoupled,  // SO(3) x R^6 Euler integration, numerically linearized
};

/// The discrete increment f(x, u, w) dt, laid out like the error state.
inline ErrorVector f_increment(const NavState& x, const ImuSample& u, double dt,
                               const NoiseVector& w = NoiseVector::Zero()) {
  const Mat3& r = x.rotation().matrix();
  ErrorVector f = ErrorVector::Zero();
  f.segment<3>(idx::kNu) = (u.accel - x.accel_bias - w.segment<3>(noise_idx::kAccel) +
                            r.transpose() * x.gravity.vector()) * dt;
  f.segment<3>(idx::kTheta) = (u.gyro - x.gyro_bias - w.segment<3>(noise_idx::kGyro)) * dt;
  f[idx::kIota] = dt;
  f.segment<3>(idx::kGyroBias) = w.segment<3>(noise_idx::kGyroWalk) * dt;
  f.segment<3>(idx::kAccelBias) = w.segment<3>(noise_idx::kAccelWalk) * dt;
  return f;
}

struct TransitionJacobians {
  Mat24 state = Mat24::Identity();      // F_dx
  NoiseJacobian noise = NoiseJacobian::Zero();  // F_w
};

/// F_dx and F_w for the Galilean propagation. The Gamma block is
/// Adj(Exp f)^-1 + Jr(f) df/dx; every other block is the identity.
inline TransitionJacobians transition_jacobians(const NavState& x, const ImuSample& u, double dt) {
  const ErrorVector f = f_increment(x, u, dt);
  const GalTangent tau = f.segment<10>(idx::kGamma);
  const Mat10 jr = sgal3::right_jacobian(tau);
  const Mat3& r = x.rotation().matrix();
  const Vec3& g = x.gravity.vector();

  // df/dx, Gamma rows only.
  Eigen::Matrix<double, 10, idx::kDim> df = Eigen::Matrix<double, 10, idx::kDim>::Zero();
  df.block<3, 3>(sgal3::kNu, idx::kTheta) = skew(r.transpose() * g) * dt;
  df.block<3, 3>(sgal3::kNu, idx::kAccelBias) = -Mat3::Identity() * dt;
  df.block<3, 2>(sgal3::kNu, idx::kGravity) = -r.transpose() * skew(g) * s2::basis(x.gravity) * dt;
  df.block<3, 3>(sgal3::kTheta, idx::kGyroBias) = -Mat3::Identity() * dt;

  // df/dw, Gamma rows only.
  Eigen::Matrix<double, 10, noise_idx::kDim> dw = Eigen::Matrix<double, 10, noise_idx::kDim>::Zero();
  dw.block<3, 3>(sgal3::kNu, noise_idx::kAccel) = -Mat3::Identity() * dt;
  dw.block<3, 3>(sgal3::kTheta, noise_idx::kGyro) = -Mat3::Identity() * dt;

  TransitionJacobians out;
  out.state.topRows<10>() = jr * df;
  out.state.block<10, 10>(idx::kGamma, idx::kGamma) += sgal3::adjoint(sgal3::exp(tau).inverse());
  out.noise.topRows<10>() = jr * dw;
  out.noise.block<3, 3>(idx::kGyroBias, noise_idx::kGyroWalk) = Mat3::Identity() * dt;
  out.noise.block<3, 3>(idx::kAccelBias, noise_idx::kAccelWalk) = Mat3::Identity() * dt;
  return out;
}

/// Covariance of the sampled noise w over one step: densities squared over dt, so
/// that F_w Q F_w^T (F_w carries one factor dt) accumulates density^2 * dt.
inline Eigen::Matrix<double, noise_idx::kDim, noise_idx::kDim> discrete_noise_covariance(
    const NoiseParams& q, double dt) {
  Eigen::Matrix<double, noise_idx::kDim, 1> d;
  d << Vec3::Constant(q.gyro_noise_density * q.gyro_noise_density),
      Vec3::Constant(q.accel_noise_density * q.accel_noise_density),
      Vec3::Constant(q.gyro_bias_walk * q.gyro_bias_walk),
      Vec3::Constant(q.accel_bias_walk * q.accel_bias_walk);
  return (d / dt).asDiagonal();
}

/// SO(3) x R^6 propagation: R Exp(w dt), v + a_w dt, p + v dt + a_w dt^2 / 2.
inline NavState propagate_decoupled(const NavState& x, const ImuSample& u, double dt,
                                    const NoiseVector& w = NoiseVector::Zero()) {
  const Vec3 omega = u.gyro - x.gyro_bias - w.segment<3>(noise_idx::kGyro);
  const Vec3 acc = u.accel - x.accel_bias - w.segment<3>(noise_idx::kAccel);
  const Vec3 acc_world = x.rotation() * acc + x.gravity.vector();
  NavState y = x;
  y.gamma.rotation = (x.rotation() * so3::exp(omega * dt)).normalized();
  y.gamma.velocity = x.velocity() + acc_world * dt;
  y.gamma.position = x.position() + x.velocity() * dt + 0.5 * acc_world * dt * dt;
  y.gamma.time = x.gamma.time + dt;
  y.gyro_bias = x.gyro_bias + w.segment<3>(noise_idx::kGyroWalk) * dt;
  y.accel_bias = x.accel_bias + w.segment<3>(noise_idx::kAccelWalk) * dt;
  return y;
}

inline NavState propagate_nominal(const NavState& x, const ImuSample& u, double dt,
                                  Propagation model, const NoiseVector& w = NoiseVector::Zero()) {
  if (model == Propagation::Decoupled) return propagate_decoupled(x, u, dt, w);
  return boxplus(x, f_increment(x, u, dt, w));
}

/// Central-difference linearization of dx' = step(x + dx, w) - step(x, 0).
inline TransitionJacobians numeric_transition_jacobians(const NavState& x, const ImuSample& u,
                                                        double dt, Propagation model,
                                                        double h = kJacobianStep) {
  const NavState base = propagate_nominal(x, u, dt, model);
  TransitionJacobians out;
  for (int i = 0; i < idx::kDim; ++i) {
    ErrorVector d = ErrorVector::Zero();
    d[i] = h;
    const ErrorVector fwd = ominus(propagate_nominal(oplus(x, d), u, dt, model), base);
    const ErrorVector bwd = ominus(propagate_nominal(oplus(x, ErrorVector(-d)), u, dt, model), base);
    out.state.col(i) = (fwd - bwd) / (2.0 * h);
  }
  for (int i = 0; i < noise_idx::kDim; ++i) {
    NoiseVector w = NoiseVector::Zero();
    w[i] = h;
    const ErrorVector fwd = ominus(propagate_nominal(x, u, dt, model, w), base);
    const ErrorVector bwd = ominus(propagate_nominal(x, u, dt, model, NoiseVector(-w)), base);
    out.noise.col(i) = (fwd - bwd) / (2.0 * h);
  }
  return out;
}

inline constexpr double kMaxPredictStep = 0.1;

/// One IMU step: nominal by boxplus, covariance by F P F^T + F_w Q F_w^T.
inline FilterState predict(const FilterState& fs, const ImuSample& u, double dt,
                           const NoiseParams& q, Propagation model = Propagation::Galilean) {
  if (!(dt > 0.0) || dt > kMaxPredictStep) {
    throw DomainError("predict: dt must lie in (0, 0.1] s");
  }
  const TransitionJacobians jac = model == Propagation::Galilean
                                      ? transition_jacobians(fs.nominal, u, dt)
                                      : numeric_transition_jacobians(fs.nominal, u, dt, model);
  FilterState out;
  out.nominal = propagate_nominal(fs.nominal, u, dt, model);
  const Mat24 p = jac.state * fs.covariance * jac.state.transpose() +
                  jac.noise * discrete_noise_covariance(q, dt) * jac.noise.transpose();
  out.covariance = 0.5 * (p + p.transpose());
  out.stamp = fs.stamp + dt;
  if (!out.covariance.allFinite()) throw DivergenceError("predict: covariance is not finite");
  return out;
}

/// J_j = d((x_j + dx) - x_prior)/d dx at dx = 0, blockwise inverse right Jacobians
/// on the groups and the chart transition on S^2.
inline Mat24 projection_jacobian(const NavState& xj, const NavState& xprior) {
  const ErrorVector d = ominus(xj, xprior);
  Mat24 j = Mat24::Identity();
  j.block<10, 10>(idx::kGamma, idx::kGamma) =
      sgal3::right_jacobian_inverse(d.segment<10>(idx::kGamma));
  j.block<6, 6>(idx::kExtrinsic, idx::kExtrinsic) =
      se3::right_jacobian_inverse(d.segment<6>(idx::kExtrinsic));
  j.block<2, 2>(idx::kGravity, idx::kGravity) =
      s2::chart_transition(xj.gravity, SphereTangent::Zero(), xprior.gravity);
  return j;
}

/// J_j^-1 without a 24x24 inversion: right Jacobians on the groups.
inline Mat24 projection_jacobian_inverse(const NavState& xj, const NavState& xprior) {
  const ErrorVector d = ominus(xj, xprior);
  Mat24 j = Mat24::Identity();
  j.block<10, 10>(idx::kGamma, idx::kGamma) = sgal3::right_jacobian(d.segment<10>(idx::kGamma));
  j.block<6, 6>(idx::kExtrinsic, idx::kExtrinsic) = se3::right_jacobian(d.segment<6>(idx::kExtrinsic));
  j.block<2, 2>(idx::kGravity, idx::kGravity) = checked_inverse<2>(
      s2::chart_transition(xj.gravity, SphereTangent::Zero(), xprior.gravity));
  return j;
}

using ResidualProvider = std::function<MeasurementBatch(const NavState&)>;

struct UpdateOptions {
  double eps = 1e-4;   // on the unweighted Euclidean norm of the step
  int max_iters = 5;
};

struct UpdateResult {
  FilterState state;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;      // no usable residuals; prior returned
  bool cost_increased = false;  // the plain iteration went uphill at least once
  std::vector<double> costs;    // MAP cost at each visited iterate
  MeasurementBatch last_batch;
};

// Variances at or below this are frozen (e.g. the time-offset block): they get
// zero gain and stay exactly zero.
inline constexpr double kFrozenVariance = 1e-24;

/// Iterated MAP update on the bundle manifold.
///
/// Each iterate relinearizes the residuals at x_j, transports the prior into
/// the tangent at x_j with P_j = J^-1 P J^-T and takes the step
///   dx = -K z - (I - K H) J^-1 (x_j - x_prior),
///   K  = (H^T V^-1 H + P_j^-1)^-1 H^T V^-1,
/// until ||dx|| < eps or max_iters. The posterior covariance is (I - K H) P_j
/// of the last iterate, with the gravity block moved onto the chart of the
/// returned state.
inline UpdateResult iterated_update(const FilterState& fs, const ResidualProvider& provider,
                                    const UpdateOptions& opts = {}) {
  if (!(opts.eps > 0.0) || opts.max_iters < 1) {
    throw DomainError("iterated_update: eps must be positive and max_iters >= 1");
  }
  const NavState& prior = fs.nominal;
  const Mat24& p_prior = fs.covariance;

  std::vector<int> active;
  for (int i = 0; i < idx::kDim; ++i) {
    if (p_prior(i, i) > kFrozenVariance) active.push_back(i);
  }
  const int na = static_cast<int>(active.size());
  auto gather = [&](const Mat24& m) {
    Eigen::MatrixXd out(na, na);
    for (int r = 0; r < na; ++r)
      for (int c = 0; c < na; ++c) out(r, c) = m(active[r], active[c]);
    return out;
  };

  // Prior information on the active subspace for the cost diagnostic.
  Eigen::LLT<Eigen::MatrixXd> prior_llt(gather(p_prior));
  if (prior_llt.info() != Eigen::Success) {
    throw DivergenceError("iterated_update: prior covariance is not positive definite");
  }

  UpdateResult result;
  result.state = fs;
  NavState xj = prior;
  for (int j = 0; j < opts.max_iters; ++j) {
    MeasurementBatch batch = provider(xj);
    if (batch.rows() == 0) {
      result.state = fs;
      result.degenerate = true;
      result.iterations = j;
      result.last_batch = std::move(batch);
      return result;
    }
    const ErrorVector dx = ominus(xj, prior);
    const Mat24 j_inv = projection_jacobian_inverse(xj, prior);
    Mat24 pj = j_inv * p_prior * j_inv.transpose();
    pj = 0.5 * (pj + pj.transpose());

    const Eigen::VectorXd v_inv = batch.noise_variance.cwiseInverse();
    const Eigen::Matrix<double, idx::kDim, Eigen::Dynamic> ht_vinv =
        batch.jacobian.transpose() * v_inv.asDiagonal();
    const Mat24 hth = ht_vinv * batch.jacobian;

    Eigen::LLT<Eigen::MatrixXd> pj_llt(gather(pj));
    if (pj_llt.info() != Eigen::Success) {
      throw DivergenceError("iterated_update: projected prior is not positive definite");
    }
    Eigen::MatrixXd info = pj_llt.solve(Eigen::MatrixXd::Identity(na, na));
    Eigen::MatrixXd rhs(na, batch.rows());
    for (int r = 0; r < na; ++r) {
      info.row(r) += hth.row(active[r])(active).eval();
      rhs.row(r) = ht_vinv.row(active[r]);
    }
    Eigen::LLT<Eigen::MatrixXd> info_llt(info);
    if (info_llt.info() != Eigen::Success) {
      throw DivergenceError("iterated_update: information matrix is not positive definite");
    }
    const Eigen::MatrixXd k_active = info_llt.solve(rhs);
    Eigen::Matrix<double, idx::kDim, Eigen::Dynamic> gain =
        Eigen::Matrix<double, idx::kDim, Eigen::Dynamic>::Zero(idx::kDim, batch.rows());
    for (int r = 0; r < na; ++r) gain.row(active[r]) = k_active.row(r);

    const Mat24 kh = gain * batch.jacobian;
    const ErrorVector step =
        -gain * batch.residuals - (Mat24::Identity() - kh) * (j_inv * dx);

    Eigen::VectorXd dx_active(na);
    for (int r = 0; r < na; ++r) dx_active[r] = dx[active[r]];
    const double cost = 0.5 * batch.residuals.dot(v_inv.cwiseProduct(batch.residuals)) +
                        0.5 * dx_active.dot(prior_llt.solve(dx_active));
    if (!result.costs.empty() && cost > result.costs.back() * (1.0 + 1e-12) + 1e-15) {
      result.cost_increased = true;
    }
    result.costs.push_back(cost);

    const NavState x_next = oplus(xj, step);
    const bool done = step.norm() < opts.eps;
    if (done || j + 1 == opts.max_iters) {
      Mat24 post = (Mat24::Identity() - kh) * pj;
      for (int i = 0; i < idx::kDim; ++i) {
        if (pj(i, i) <= kFrozenVariance) {
          post.row(i).setZero();
          post.col(i).setZero();
        }
      }
      // The gravity chart is not continuous near its reference axis, so the
      // block is carried from the chart at x_j to the chart at x_next.
      Mat24 reset = Mat24::Identity();
      reset.block<2, 2>(idx::kGravity, idx::kGravity) = s2::chart_transition(
          xj.gravity, SphereTangent(step.segment<2>(idx::kGravity)), x_next.gravity);
      post = reset * post * reset.transpose();
      post = 0.5 * (post + post.transpose());
      if (!post.allFinite()) throw DivergenceError("iterated_update: covariance is not finite");

      result.state.nominal = x_next;
      result.state.covariance = post;
      result.state.stamp = fs.stamp;
      result.iterations = j + 1;
      result.converged = done;
      result.last_batch = std::move(batch);
      return result;
    }
    xj = x_next;
  }
  return result;
}

/// Symmetry to `sym_tol` and smallest eigenvalue above -psd_tol.
inline bool covariance_is_valid(const Mat24& p, double sym_tol = 1e-10, double psd_tol = 1e-9) {
  if (!p.allFinite()) return false;
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > sym_tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat24> es(p, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -psd_tol;
}

}  // namespace galileo

#endif  // GALILEO_FILTER_IESKF_HPP
