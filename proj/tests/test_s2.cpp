#include <gtest/gtest.h>

#include "galileo/manifold/s2.hpp"
#include "test_util.hpp"

using namespace galileo;
using galileo::testing::max_abs_diff;
using galileo::testing::Rng;

namespace {

constexpr double kR = 9.81;

SpherePoint random_point(Rng& rng, double r = kR) { return SpherePoint(rng.unit() * r, r); }

SphereTangent random_tangent(Rng& rng, double max_norm) {
  const Vec2 dir = Vec2(rng.normal(), rng.normal()).normalized();
  return dir * rng.uniform(0.0, max_norm);
}

// Angle-based reference for y - x, written from the geometric definition.
SphereTangent exact_ominus(const SpherePoint& y, const SpherePoint& x) {
  const Vec3 c = x.vector().cross(y.vector());
  const double angle = std::atan2(c.norm(), x.vector().dot(y.vector()));
  return s2::basis(x).transpose() * (c.normalized() * angle);
}

}  // namespace

TEST(S2, DefaultPointIsGravity) {
  const SpherePoint g;
  EXPECT_EQ(g.vector(), Vec3(0, 0, -9.81));
  EXPECT_EQ(g.radius(), 9.81);
}

TEST(S2, RejectsInvalidPoints) {
  EXPECT_THROW(SpherePoint(Vec3(1, 0, 0), 2.0), InvariantError);
  EXPECT_THROW(SpherePoint(Vec3::Zero(), 0.0), InvariantError);
  EXPECT_NO_THROW(SpherePoint(Vec3(0, 2, 0), 2.0));
}

TEST(S2, BasisAlignedCase) {
  const Mat32 b = s2::basis(SpherePoint(Vec3(0, 0, kR), kR));
  EXPECT_EQ(b.col(0), Vec3::UnitX());
  EXPECT_EQ(b.col(1), Vec3::UnitY());
}

TEST(S2, BasisIsOrthonormalAndTangent) {
  const SpherePoint ex(Vec3(kR, 0, 0), kR);
  const Mat32 be = s2::basis(ex);
  EXPECT_LT((be.transpose() * ex.vector()).norm(), 1e-12);
  EXPECT_LT(max_abs_diff(be.transpose() * be, Mat2::Identity()), 1e-12);

  Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint x = random_point(rng);
    const Mat32 b = s2::basis(x);
    EXPECT_LT(max_abs_diff(b.transpose() * b, Mat2::Identity()), 1e-10);
    EXPECT_LT((b.transpose() * x.vector()).norm() / kR, 1e-10);
    EXPECT_GT(x.vector().dot(b.col(0).cross(b.col(1))), 0.0);
  }
}

TEST(S2, BasisAtSouthPoleUsesHalfTurn) {
  const SpherePoint x(Vec3(0, 0, -kR), kR);
  const Mat32 b = s2::basis(x);
  EXPECT_EQ(b.col(0), Vec3::UnitX());
  EXPECT_EQ(b.col(1), Vec3(0, -1, 0));
  EXPECT_GT(x.vector().dot(b.col(0).cross(b.col(1))), 0.0);
}

TEST(S2, OplusPreservesNorm) {
  const SpherePoint n(Vec3(0, 0, kR), kR);
  const SpherePoint q = s2::oplus(n, SphereTangent(kPi / 2, 0));
  EXPECT_LT(std::abs(q.vector().norm() - kR), 1e-12);
  // e3 turned a quarter about b1 = e1
  EXPECT_LT((q.vector() - Vec3(0, -kR, 0)).norm(), 1e-12);

  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint y = s2::oplus(random_point(rng), random_tangent(rng, 10.0));
    EXPECT_LT(std::abs(y.vector().norm() - kR), 1e-12);
  }
}

TEST(S2, OplusZeroIsIdentity) {
  Rng rng(43);
  const SpherePoint x = random_point(rng);
  EXPECT_EQ(s2::oplus(x, SphereTangent::Zero()).vector(), x.vector());
}

TEST(S2, RoundTrip) {
  Rng rng(44);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint x = random_point(rng);
    const SphereTangent tau = random_tangent(rng, kPi - 1e-3);
    worst = std::max(worst, (s2::ominus(s2::oplus(x, tau), x) - tau).norm());
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(S2, OminusSelfAndAntipode) {
  Rng rng(45);
  for (int i = 0; i < 100; ++i) {
    const SpherePoint x = random_point(rng);
    EXPECT_EQ(s2::ominus(x, x), SphereTangent::Zero());
    const SpherePoint y(-x.vector(), kR);
    const SphereTangent d = s2::ominus(y, x);
    EXPECT_EQ(d[0], kPi);
    EXPECT_EQ(d[1], 0.0);
  }
}

TEST(S2, OminusRejectsRadiusMismatch) {
  EXPECT_THROW(s2::ominus(SpherePoint(Vec3(0, 0, 1), 1.0), SpherePoint()), InvariantError);
}

TEST(S2, TinyIncrementAtAlignedPointIsRecoveredExactly) {
  const SpherePoint x(Vec3(0, 0, kR), kR);
  Rng rng(46);
  for (int i = 0; i < 100; ++i) {
    const SphereTangent tau = Vec2(rng.normal(), rng.normal()).normalized() * 1e-9;
    const SphereTangent back = s2::ominus(s2::oplus(x, tau), x);
    EXPECT_LT((back - tau).norm() / tau.norm(), 1e-12);
  }
}

TEST(S2, TinyIncrementAtGenericPoint) {
  // At a generic point y - x cancels ~r digits before the cross product; the
  // recovery is limited by that, not by the first-order branch.
  Rng rng(47);
  for (int i = 0; i < 100; ++i) {
    const SpherePoint x = random_point(rng);
    const SphereTangent tau = Vec2(rng.normal(), rng.normal()).normalized() * 1e-9;
    const SphereTangent back = s2::ominus(s2::oplus(x, tau), x);
    EXPECT_LT((back - tau).norm() / tau.norm(), 1e-6);
  }
}

TEST(S2, BranchSeamIsContinuous) {
  Rng rng(48);
  for (int i = 0; i < 100; ++i) {
    const SpherePoint x = random_point(rng);
    const Vec3 axis = s2::basis(x) * Vec2(rng.normal(), rng.normal()).normalized();
    for (double f : {1.0 - 1e-6, 1.0 + 1e-6}) {
      const double angle = s2::kFirstOrderThreshold * f;
      const SpherePoint y = SpherePoint::projected(so3::exp(axis * angle) * x.vector(), kR);
      EXPECT_LT((s2::ominus(y, x) - exact_ominus(y, x)).norm(), 1e-10);
    }
  }
}

TEST(S2, BoxplusRotatesIntoBodyFrame) {
  Rng rng(49);
  const SpherePoint x = random_point(rng);
  EXPECT_EQ(s2::boxplus(x, Vec3::Zero()).vector(), x.vector());

  const SpherePoint n(Vec3(0, 0, kR), kR);
  const SpherePoint y = s2::boxplus(n, Vec3(kPi / 2, 0, 0));
  EXPECT_LT((y.vector() - so3::exp(Vec3(kPi / 2, 0, 0)).matrix().transpose() * n.vector()).norm(), 1e-12);
  EXPECT_LT((y.vector() - Vec3(0, kR, 0)).norm(), 1e-12);

  const Vec3 w1(0.4, 0, 0), w2(0, 0.7, 0);
  const Vec3 ab = s2::boxplus(s2::boxplus(x, w1), w2).vector();
  const Vec3 ba = s2::boxplus(s2::boxplus(x, w2), w1).vector();
  EXPECT_GT((ab - ba).norm(), 1e-3);
  for (int i = 0; i < 100; ++i) {
    EXPECT_LT(std::abs(s2::boxplus(x, rng.vec<3>(3.0)).vector().norm() - kR), 1e-12);
  }
}

TEST(S2, OminusJacobianMatchesFiniteDifferences) {
  Rng rng(50);
  const double h = 1e-6;
  auto check = [&](const SpherePoint& x, const SpherePoint& y) {
    const Mat23 j = s2::ominus_jacobian_wrt_y(x, y);
    Mat23 fd;
    for (int i = 0; i < 3; ++i) {
      const Vec3 e = Vec3::Unit(i) * h;
      fd.col(i) = (s2::ominus(SpherePoint::projected(y.vector() + e, kR), x) -
                   s2::ominus(SpherePoint::projected(y.vector() - e, kR), x)) /
                  (2 * h);
    }
    return max_abs_diff(j, fd) / j.cwiseAbs().maxCoeff();
  };
  for (int i = 0; i < 200; ++i) {
    const SpherePoint x = random_point(rng);
    const double angle = i == 0 ? 0.5 : rng.uniform(1e-6, kPi - 1e-3);
    const Vec3 axis = s2::basis(x) * Vec2(rng.normal(), rng.normal()).normalized();
    const SpherePoint y = SpherePoint::projected(so3::exp(axis * angle) * x.vector(), kR);
    EXPECT_LT(check(x, y), 1e-5) << angle;
  }
}

TEST(S2, OminusJacobianFirstOrderBranch) {
  Rng rng(51);
  const SpherePoint x = random_point(rng);
  const SpherePoint y = s2::oplus(x, SphereTangent(1e-8, 0));
  const Mat23 expected = s2::basis(x).transpose() * skew(x.vector()) / (kR * kR);
  EXPECT_EQ(s2::ominus_jacobian_wrt_y(x, y), expected);

  const SpherePoint n(Vec3(0, 0, kR), kR);
  const SpherePoint m = s2::oplus(n, SphereTangent(1e-9, -2e-9));
  EXPECT_LT((s2::ominus_jacobian_wrt_y(n, m) * n.vector()).norm(), 1e-12);
}

TEST(S2, OminusJacobianAntipodalThrows) {
  const SpherePoint x;
  EXPECT_THROW(s2::ominus_jacobian_wrt_y(x, SpherePoint(-x.vector(), x.radius())), ConditioningError);
}

TEST(S2, OplusJacobianAndChartTransition) {
  Rng rng(52);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const SpherePoint x = random_point(rng);
    const SphereTangent tau = random_tangent(rng, 1.0);
    const SpherePoint ref = s2::oplus(x, random_tangent(rng, 0.5));
    Mat32 fd_plus;
    Mat2 fd_chart;
    for (int k = 0; k < 2; ++k) {
      const Vec2 e = Vec2::Unit(k) * h;
      const SpherePoint a = s2::oplus(x, tau + e), b = s2::oplus(x, tau - e);
      fd_plus.col(k) = (a.vector() - b.vector()) / (2 * h);
      fd_chart.col(k) = (s2::ominus(a, ref) - s2::ominus(b, ref)) / (2 * h);
    }
    EXPECT_LT(max_abs_diff(s2::oplus_jacobian(x, tau), fd_plus) / kR, 1e-7);
    EXPECT_LT(max_abs_diff(s2::chart_transition(x, tau, ref), fd_chart), 1e-7);
  }
  // The transition of a chart onto itself at zero offset is the identity.
  const SpherePoint x = random_point(rng);
  EXPECT_LT(max_abs_diff(s2::chart_transition(x, SphereTangent::Zero(), x), Mat2::Identity()), 1e-12);
}
