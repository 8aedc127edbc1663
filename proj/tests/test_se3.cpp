#include <gtest/gtest.h>

#include "galileo/lie/se3.hpp"
#include "test_util.hpp"

using namespace galileo;
using galileo::testing::max_abs_diff;
using galileo::testing::Rng;

TEST(Se3, ZeroAndPureTranslation) {
  const Pose3 id = se3::exp(Vec6::Zero());
  EXPECT_EQ(id.rotation.matrix(), Mat3::Identity());
  EXPECT_EQ(id.translation, Vec3::Zero());

  Vec6 tau = Vec6::Zero();
  tau.head<3>() = Vec3(1.5, -2.0, 0.25);
  const Pose3 t = se3::exp(tau);
  EXPECT_EQ(t.rotation.matrix(), Mat3::Identity());
  EXPECT_LT((t.translation - tau.head<3>()).norm(), 1e-15);
}

TEST(Se3, ExpMatchesMatrixSeries) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    Vec6 tau;
    tau << rng.vec<3>(2.0), rng.angle_axis(0.0, 3.0);
    Eigen::Matrix4d alg = Eigen::Matrix4d::Zero();
    alg.topLeftCorner<3, 3>() = skew(tau.tail<3>());
    alg.topRightCorner<3, 1>() = tau.head<3>();
    EXPECT_LT(max_abs_diff(se3::exp(tau).matrix(), galileo::testing::series_exp(alg)), 1e-10);
  }
}

TEST(Se3, LogRoundTrip) {
  Rng rng(12);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vec6 tau;
    tau << rng.vec<3>(3.0), rng.angle_axis(0.0, kPi - 1e-3);
    worst = std::max(worst, (se3::log(se3::exp(tau)) - tau).norm());
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Se3, OplusOminusAndInverse) {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const Pose3 x(rng.rotation(), rng.vec<3>(5.0));
    Vec6 tau;
    tau << rng.vec<3>(1.0), rng.angle_axis(0.0, 2.5);
    EXPECT_LT((ominus(oplus(x, tau), x) - tau).norm(), 1e-9);
    EXPECT_LT(max_abs_diff((x * x.inverse()).matrix(), Eigen::Matrix4d::Identity()), 1e-12);
    EXPECT_LT(ominus(x, x).norm(), 1e-12);
  }
}

TEST(Se3, RightJacobianFirstOrder) {
  Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    Vec6 tau;
    tau << rng.vec<3>(1.0), rng.angle_axis(0.0, 2.5);
    const Mat6 jr = se3::right_jacobian(tau);
    Vec6 d = Vec6::Zero();
    for (int k = 0; k < 6; ++k) d[k] = rng.uniform();
    d *= 1e-4 / d.norm();
    const Vec6 lhs = se3::log(se3::exp(tau).inverse() * se3::exp(tau + d));
    EXPECT_LT((lhs - jr * d).norm(), 1e-7);
    EXPECT_LT(max_abs_diff(jr * se3::right_jacobian_inverse(tau), Mat6::Identity()), 1e-9);
  }
}
