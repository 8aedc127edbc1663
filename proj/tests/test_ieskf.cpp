#include <gtest/gtest.h>

#include "galileo/filter/ieskf.hpp"
#include "test_util.hpp"

using namespace galileo;
using galileo::testing::max_abs_diff;
using galileo::testing::Rng;

namespace {

ImuSample random_input(Rng& rng) { return {0.0, rng.vec<3>(1.5), rng.vec<3>(12.0)}; }

Mat24 block_diag_covariance(double att, double vel, double pos) {
  ErrorVector d;
  d << Vec3::Constant(pos), Vec3::Constant(vel), Vec3::Constant(att), 0.0, Vec6::Constant(1e-6),
      Vec3::Constant(1e-4), Vec3::Constant(1e-2), Vec2::Constant(1e-4);
  return d.asDiagonal();
}

}  // namespace

TEST(Ieskf, IncrementOfHoverIsTimeOnly) {
  Rng rng(81);
  NavState x = rng.nav_state();
  ImuSample u;
  u.accel = x.accel_bias - x.rotation().matrix().transpose() * x.gravity.vector();
  u.gyro = x.gyro_bias;
  const ErrorVector f = f_increment(x, u, 0.01);
  ErrorVector expected = ErrorVector::Zero();
  expected[idx::kIota] = 0.01;
  EXPECT_LT((f - expected).norm(), 1e-15);
}

TEST(Ieskf, IncrementBiasCancellation) {
  NavState x;
  x.accel_bias = Vec3(0.1, 0, 0);
  ImuSample u;
  u.accel = Vec3(0.1, 0, 0) - x.gravity.vector();  // R = I
  EXPECT_LT(f_increment(x, u, 0.005).segment<3>(idx::kNu).norm(), 1e-16);
}

TEST(Ieskf, IncrementMatchesIndependentTranscription) {
  Rng rng(82);
  for (int i = 0; i < 100; ++i) {
    const NavState x = rng.nav_state();
    const ImuSample u = random_input(rng);
    const double dt = rng.uniform(1e-3, 0.05);
    NoiseVector w;
    for (int k = 0; k < 12; ++k) w[k] = rng.normal();
    // rows: rho 0 | nu (a - ba - na + R^T g) | theta (w - bw - nw) | iota 1 | ext 0 | bw nbw | ba nba | g 0
    ErrorVector ref = ErrorVector::Zero();
    const Mat3 rt = x.gamma.rotation.matrix().transpose();
    for (int k = 0; k < 3; ++k) {
      ref[3 + k] = (u.accel[k] - x.accel_bias[k] - w[3 + k] + (rt * x.gravity.vector())[k]) * dt;
      ref[6 + k] = (u.gyro[k] - x.gyro_bias[k] - w[k]) * dt;
      ref[16 + k] = w[6 + k] * dt;
      ref[19 + k] = w[9 + k] * dt;
    }
    ref[9] = dt;
    EXPECT_LT((f_increment(x, u, dt, w) - ref).norm(), 1e-13);
  }
}

TEST(Ieskf, TransitionJacobiansMatchFiniteDifferences) {
  Rng rng(83);
  double worst_state = 0.0, worst_noise = 0.0;
  for (int i = 0; i < 100; ++i) {
    const NavState x = rng.nav_state();
    const ImuSample u = random_input(rng);
    const TransitionJacobians an = transition_jacobians(x, u, 0.005);
    const TransitionJacobians fd = numeric_transition_jacobians(x, u, 0.005, Propagation::Galilean);
    worst_state = std::max(worst_state, max_abs_diff(an.state, fd.state));
    worst_noise = std::max(worst_noise, max_abs_diff(an.noise, fd.noise));
  }
  EXPECT_LT(worst_state, 1e-5);
  EXPECT_LT(worst_noise, 1e-5);
}

TEST(Ieskf, TransitionJacobianApproachesIdentity) {
  Rng rng(84);
  const NavState x = rng.nav_state();
  const ImuSample u = random_input(rng);
  double prev = 1e300;
  for (double dt : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const double dev = max_abs_diff(transition_jacobians(x, u, dt).state, Mat24::Identity());
    EXPECT_LT(dev, prev);
    EXPECT_LT(dev, 50 * dt);
    prev = dev;
  }
}

TEST(Ieskf, NoiseJacobianStructure) {
  Rng rng(85);
  const NavState x = rng.nav_state();
  const ImuSample u = random_input(rng);
  const double dt = 0.005;
  const NoiseJacobian fw = transition_jacobians(x, u, dt).noise;
  EXPECT_EQ(fw.row(idx::kIota).norm(), 0.0);
  EXPECT_EQ(fw.middleRows<6>(idx::kExtrinsic).norm(), 0.0);
  EXPECT_EQ(fw.middleRows<2>(idx::kGravity).norm(), 0.0);
  // The position rows pick up noise only through Jr, at second order in dt.
  EXPECT_LT(fw.middleRows<3>(idx::kRho).cwiseAbs().maxCoeff(), dt * dt);
  EXPECT_EQ((fw.block<3, 3>(idx::kGyroBias, noise_idx::kGyroWalk)), Mat3::Identity() * dt);
  EXPECT_EQ((fw.block<3, 3>(idx::kAccelBias, noise_idx::kAccelWalk)), Mat3::Identity() * dt);
}

TEST(Ieskf, PredictWithoutNoiseIsPureTransport) {
  Rng rng(86);
  FilterState fs;
  fs.nominal = rng.nav_state();
  const NoiseParams zero{0.0, 0.0, 0.0, 0.0};
  const FilterState a = predict(fs, ImuSample{}, 0.005, zero);
  EXPECT_EQ(a.covariance.trace(), 0.0);
  EXPECT_EQ(a.covariance.norm(), 0.0);

  fs.covariance = block_diag_covariance(1e-3, 1e-2, 1e-2);
  const ImuSample u = random_input(rng);
  const FilterState b = predict(fs, u, 0.005, zero);
  const Mat24 f = transition_jacobians(fs.nominal, u, 0.005).state;
  EXPECT_LT(max_abs_diff(b.covariance, f * fs.covariance * f.transpose()), 1e-15);
  EXPECT_TRUE(covariance_is_valid(b.covariance));
}

TEST(Ieskf, PredictRejectsBadStep) {
  FilterState fs;
  EXPECT_THROW(predict(fs, ImuSample{}, 0.0, NoiseParams{}), DomainError);
  EXPECT_THROW(predict(fs, ImuSample{}, 0.2, NoiseParams{}), DomainError);
}

TEST(Ieskf, GyroNoiseOnlyGrowsItsBlocks) {
  Rng rng(87);
  FilterState fs;
  fs.nominal = rng.nav_state();
  const NoiseParams q{1e-2, 0.0, 1e-3, 0.0};
  for (int k = 0; k < 20; ++k) fs = predict(fs, random_input(rng), 0.005, q);
  const Mat24& p = fs.covariance;
  EXPECT_GT((p.block<3, 3>(idx::kTheta, idx::kTheta).trace()), 0.0);
  EXPECT_GT((p.block<3, 3>(idx::kNu, idx::kNu).trace()), 0.0);
  EXPECT_GT((p.block<3, 3>(idx::kRho, idx::kRho).trace()), 0.0);
  EXPECT_GT((p.block<3, 3>(idx::kGyroBias, idx::kGyroBias).trace()), 0.0);
  EXPECT_EQ(p(idx::kIota, idx::kIota), 0.0);
  EXPECT_EQ((p.block<6, 6>(idx::kExtrinsic, idx::kExtrinsic).norm()), 0.0);
  EXPECT_EQ((p.block<3, 3>(idx::kAccelBias, idx::kAccelBias).norm()), 0.0);
  EXPECT_EQ((p.block<2, 2>(idx::kGravity, idx::kGravity).norm()), 0.0);
}

TEST(Ieskf, MonteCarloPropagationIsConsistent) {
  // Sample initial errors and process noise, propagate the true dynamics and
  // compare against the predicted covariance. iota carries no variance, so the
  // statistic lives on the remaining 23 dimensions.
  Rng rng(88);
  const int samples = 2000, steps = 50;
  const double dt = 0.005;
  const NoiseParams q{5e-3, 5e-2, 1e-3, 1e-2};

  FilterState fs;
  fs.nominal = rng.nav_state();
  fs.covariance = block_diag_covariance(1e-4, 1e-3, 1e-3);

  std::vector<int> active;
  for (int i = 0; i < idx::kDim; ++i)
    if (i != idx::kIota) active.push_back(i);
  const int na = static_cast<int>(active.size());

  Mat24 l0 = Mat24::Zero();
  for (int i = 0; i < idx::kDim; ++i) l0(i, i) = std::sqrt(fs.covariance(i, i));

  std::vector<NavState> truth(samples);
  for (auto& t : truth) {
    ErrorVector z;
    for (int i = 0; i < idx::kDim; ++i) z[i] = rng.normal();
    t = oplus(fs.nominal, ErrorVector(l0 * z));
  }
  std::vector<ImuSample> inputs(steps);
  for (auto& u : inputs) u = random_input(rng);

  const Eigen::Matrix<double, 12, 12> qd = discrete_noise_covariance(q, dt);
  const Eigen::Matrix<double, 12, 1> wstd = qd.diagonal().cwiseSqrt();
  for (int k = 0; k < steps; ++k) {
    for (auto& t : truth) {
      NoiseVector w;
      for (int i = 0; i < 12; ++i) w[i] = rng.normal(wstd[i]);
      t = propagate_nominal(t, inputs[k], dt, Propagation::Galilean, w);
    }
    fs = predict(fs, inputs[k], dt, q);
    Eigen::MatrixXd pa(na, na);
    for (int r = 0; r < na; ++r)
      for (int c = 0; c < na; ++c) pa(r, c) = fs.covariance(active[r], active[c]);
    Eigen::LLT<Eigen::MatrixXd> llt(pa);
    ASSERT_EQ(llt.info(), Eigen::Success);
    double mean = 0.0;
    for (const auto& t : truth) {
      const ErrorVector e = ominus(t, fs.nominal);
      Eigen::VectorXd ea(na);
      for (int r = 0; r < na; ++r) ea[r] = e[active[r]];
      mean += ea.dot(llt.solve(ea));
    }
    mean /= samples;
    EXPECT_GT(mean, 0.8 * na) << "step " << k;
    EXPECT_LT(mean, 1.2 * na) << "step " << k;
  }
}

TEST(Ieskf, ProjectionJacobianIdentityAtPrior) {
  Rng rng(89);
  const NavState x = rng.nav_state();
  EXPECT_LT(max_abs_diff(projection_jacobian(x, x), Mat24::Identity()), 1e-9);
}

TEST(Ieskf, ProjectionJacobianMatchesFiniteDifferences) {
  Rng rng(90);
  const double h = 1e-6;
  for (int n = 0; n < 20; ++n) {
    const NavState prior = rng.nav_state();
    const NavState xj = oplus(prior, rng.error(0.2));
    Mat24 fd;
    for (int i = 0; i < idx::kDim; ++i) {
      ErrorVector d = ErrorVector::Zero();
      d[i] = h;
      fd.col(i) = (ominus(oplus(xj, d), prior) - ominus(oplus(xj, ErrorVector(-d)), prior)) / (2 * h);
    }
    const Mat24 j = projection_jacobian(xj, prior);
    EXPECT_LT(max_abs_diff(j, fd), 1e-5);
    EXPECT_LT(max_abs_diff(j * projection_jacobian_inverse(xj, prior), Mat24::Identity()), 1e-8);
  }
}

TEST(Ieskf, UpdateWithZeroResidualStaysAtPrior) {
  Rng rng(91);
  FilterState fs;
  fs.nominal = rng.nav_state();
  fs.covariance = block_diag_covariance(1e-3, 1e-2, 1e-2);
  const Eigen::Matrix<double, 4, 24> h = Eigen::Matrix<double, 4, 24>::Random();
  const UpdateResult r = iterated_update(fs, [&](const NavState&) {
    MeasurementBatch b;
    b.resize(4);
    b.residuals.setZero();
    b.jacobian = h;
    b.noise_variance.setConstant(0.01);
    return b;
  });
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LT(ominus(r.state.nominal, fs.nominal).norm(), 1e-15);
  EXPECT_TRUE(covariance_is_valid(r.state.covariance));
  EXPECT_LT(r.state.covariance.trace(), fs.covariance.trace());
  EXPECT_EQ(r.state.covariance(idx::kIota, idx::kIota), 0.0);
}

TEST(Ieskf, EmptyBatchIsReportedAsDegenerate) {
  FilterState fs;
  fs.covariance = block_diag_covariance(1e-3, 1e-2, 1e-2);
  const UpdateResult r = iterated_update(fs, [](const NavState&) { return MeasurementBatch{}; });
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.state.covariance, fs.covariance);
}

TEST(Ieskf, LinearBiasSubproblemMatchesKalman) {
  Rng rng(92);
  FilterState fs;
  fs.nominal = rng.nav_state();
  fs.covariance = block_diag_covariance(1e-3, 1e-2, 1e-2);
  Mat6 p6 = Mat6::Zero();
  {
    Mat6 a = Mat6::Random() * 0.05;
    p6 = a * a.transpose() + Mat6::Identity() * 1e-3;
  }
  fs.covariance.block<6, 6>(idx::kGyroBias, idx::kGyroBias) = p6;

  const int m = 8;
  const Eigen::Matrix<double, 8, 6> h6 = Eigen::Matrix<double, 8, 6>::Random();
  Vec6 b_true;
  b_true << rng.vec<3>(0.1), rng.vec<3>(0.3);
  Eigen::VectorXd y = h6 * b_true;
  Eigen::VectorXd var(m);
  for (int i = 0; i < m; ++i) {
    var[i] = 1e-3 * (1 + i);
    y[i] += rng.normal(std::sqrt(var[i]));
  }
  auto provider = [&](const NavState& x) {
    Vec6 b;
    b << x.gyro_bias, x.accel_bias;
    MeasurementBatch batch;
    batch.resize(m);
    batch.residuals = h6 * b - y;
    batch.jacobian.setZero();
    batch.jacobian.middleCols<6>(idx::kGyroBias) = h6;
    batch.noise_variance = var;
    return batch;
  };

  Vec6 b0;
  b0 << fs.nominal.gyro_bias, fs.nominal.accel_bias;
  const Eigen::MatrixXd s = h6 * p6 * h6.transpose() + Eigen::MatrixXd(var.asDiagonal());
  const Eigen::MatrixXd k = p6 * h6.transpose() * s.inverse();
  const Vec6 b_post = b0 + k * (y - h6 * b0);
  const Mat6 p_post = (Mat6::Identity() - k * h6) * p6;

  for (int iters : {1, 5}) {
    const UpdateResult r = iterated_update(fs, provider, UpdateOptions{1e-4, iters});
    Vec6 b;
    b << r.state.nominal.gyro_bias, r.state.nominal.accel_bias;
    EXPECT_LT((b - b_post).cwiseAbs().maxCoeff(), 1e-9) << iters;
    EXPECT_LT(max_abs_diff(r.state.covariance.block<6, 6>(idx::kGyroBias, idx::kGyroBias), p_post), 1e-9);
    EXPECT_LT(max_abs_diff(r.state.nominal.gamma.matrix(), fs.nominal.gamma.matrix()), 1e-15);
    EXPECT_LT(max_abs_diff(r.state.covariance.topLeftCorner<16, 16>(), fs.covariance.topLeftCorner<16, 16>()),
              1e-15);
  }
}

TEST(Ieskf, MoreIterationsLowerTheMapCost) {
  // One squared-range measurement to a landmark, prior far from the solution.
  Rng rng(93);
  FilterState fs;
  fs.nominal = rng.nav_state();
  fs.covariance = block_diag_covariance(1e-2, 1e-1, 4.0);
  fs.covariance(idx::kIota, idx::kIota) = 1e-6;
  const Vec3 landmark = fs.nominal.position() + Vec3(3.0, -1.0, 0.5);
  const double range = 1.5;
  const double var = 1e-4;
  auto provider = [&](const NavState& x) {
    const Vec3 d = x.position() - landmark;
    MeasurementBatch b;
    b.resize(1);
    b.residuals[0] = d.squaredNorm() - range * range;
    b.jacobian.setZero();
    b.jacobian.block<1, 3>(0, idx::kRho) = 2.0 * d.transpose() * x.rotation().matrix();
    // position moves by v * d_iota under a right perturbation
    b.jacobian(0, idx::kIota) = 2.0 * d.dot(x.velocity());
    b.noise_variance.setConstant(var);
    return b;
  };
  const Eigen::LLT<Mat24> prior_llt(fs.covariance);
  auto cost = [&](const NavState& x) {
    const double z = provider(x).residuals[0];
    const ErrorVector e = ominus(x, fs.nominal);
    return 0.5 * z * z / var + 0.5 * e.dot(prior_llt.solve(e));
  };
  const UpdateResult one = iterated_update(fs, provider, UpdateOptions{1e-12, 1});
  const UpdateResult ten = iterated_update(fs, provider, UpdateOptions{1e-12, 10});
  EXPECT_LT(cost(ten.state.nominal), cost(one.state.nominal));
  EXPECT_LT(cost(one.state.nominal), cost(fs.nominal));
  EXPECT_FALSE(ten.cost_increased);
  EXPECT_TRUE(covariance_is_valid(ten.state.covariance));
}

TEST(Ieskf, RejectsBadOptions) {
  FilterState fs;
  auto provider = [](const NavState&) { return MeasurementBatch{}; };
  EXPECT_THROW(iterated_update(fs, provider, UpdateOptions{0.0, 5}), DomainError);
  EXPECT_THROW(iterated_update(fs, provider, UpdateOptions{1e-4, 0}), DomainError);
}
