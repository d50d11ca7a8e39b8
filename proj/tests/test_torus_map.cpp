#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "heischar/profiles.hpp"
#include "heischar/torus_map.hpp"

using namespace heischar;

TEST(TorusMap, FrozenValues) {
  const ProductPoint a = F(HPoint(1.0, 0.0, 4.0));
  EXPECT_EQ(a.w, Vec2(4.0, 1.0));
  EXPECT_EQ(a.u, Vec2(1.0, 0.0));
  const ProductPoint b = F(HPoint(0.0, 2.0, 0.0));
  EXPECT_EQ(b.w, Vec2(0.0, 4.0));
  EXPECT_EQ(b.u, Vec2(0.0, 1.0));
  EXPECT_EQ(F_inv(ProductPoint::make(Vec2(4.0, 1.0), Vec2(1.0, 0.0))), HPoint(1.0, 0.0, 4.0));
  EXPECT_EQ(F_inv(ProductPoint::make(Vec2(0.0, 4.0), Vec2(0.0, 1.0))), HPoint(0.0, 2.0, 0.0));
}

TEST(TorusMap, CenterIsExcluded) {
  EXPECT_THROW(F(HPoint(0.0, 0.0, 1.0)), DomainError);
  EXPECT_THROW(F(HPoint(1e-13, 0.0, 1.0)), DomainError);
  EXPECT_NO_THROW(F(HPoint(1e-11, 0.0, 1.0)));
  EXPECT_THROW(F_inv(ProductPoint{Vec2(1.0, 0.0), Vec2(1.0, 0.0)}), DomainError);
  EXPECT_THROW(ProductPoint::make(Vec2(1.0, -1.0), Vec2(1.0, 0.0)), DomainError);
  EXPECT_THROW(ProductPoint::make(Vec2(1.0, 1.0), Vec2(1.0, 0.1)), DomainError);
  EXPECT_THROW(TF(HPoint(0.0, 0.0, 0.0), TangentVector(HPoint(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0))), DomainError);
}

TEST(TorusMap, TangentFrozenValues) {
  const HPoint p(1.0, 0.0, 4.0);
  const ProductTangent a = TF(p, TangentVector(p, Vec3(0.0, 0.0, 1.0)));
  EXPECT_EQ(a.dw, Vec2(1.0, 0.0));
  EXPECT_EQ(a.du, Vec2(0.0, 0.0));
  const ProductTangent b = TF(p, TangentVector(p, Vec3(0.0, 1.0, 0.0)));
  EXPECT_EQ(b.dw, Vec2(0.0, 0.0));
  EXPECT_EQ(b.du, Vec2(0.0, 1.0));
}

TEST(TorusMap, RoundTrips) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  for (int k = 0; k < 20000; ++k) {
    const HPoint p(u(rng), u(rng), u(rng));
    if (std::sqrt(p.z_norm_sq()) < 0.1) continue;
    const HPoint back = F_inv(F(p));
    EXPECT_LE((back.to_vec3() - p.to_vec3()).cwiseAbs().maxCoeff(), 1e-12);

    const double th = ang(rng);
    const ProductPoint q = ProductPoint::make(Vec2(u(rng), 0.01 + std::abs(u(rng))), Vec2(std::cos(th), std::sin(th)));
    const ProductPoint q2 = F(F_inv(q));
    EXPECT_LE((q2.w - q.w).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((q2.u - q.u).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TorusMap, TangentMatchesFiniteDifferences) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    const HPoint p(u(rng), u(rng), u(rng));
    if (std::sqrt(p.z_norm_sq()) < 0.1) continue;
    EXPECT_LE((TF_matrix(p) - F_jacobian_fd(p)).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(TorusMap, TangentIsLinearAndTangentToCircle) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    const HPoint p(u(rng), u(rng), u(rng));
    if (std::sqrt(p.z_norm_sq()) < 0.1) continue;
    const Vec3 v1(u(rng), u(rng), u(rng)), v2(u(rng), u(rng), u(rng));
    const ProductTangent a = TF(p, TangentVector(p, v1));
    const ProductTangent b = TF(p, TangentVector(p, v2));
    const ProductTangent c = TF(p, TangentVector(p, Vec3(2.0 * v1 - 3.0 * v2)));
    EXPECT_LE((c.dw - (2.0 * a.dw - 3.0 * b.dw)).norm(), 1e-12);
    EXPECT_LE((c.du - (2.0 * a.du - 3.0 * b.du)).norm(), 1e-11);
    EXPECT_LE(std::abs(a.du.dot(F(p).u)), 1e-12);
  }
}

TEST(TorusMap, TangentHasFullRank) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    const HPoint p(u(rng), u(rng), u(rng));
    EXPECT_GT(TF_singular_values(p)[2], 0.0);
  }
  // sigma_min ~ 2|z| near the axis, still positive.
  EXPECT_GT(TF_singular_values(HPoint(1e-11, 0.0, 0.0))[2], 0.0);
}

TEST(TorusMap, BoundaryMapsOntoProfileCurve) {
  const TorusDomain t = TorusDomain::make(ellipse_profile(0.5, 3.0, 2.0, 1.0));
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 8; ++j) {
      const double s = i / 64.0, th = 2.0 * std::numbers::pi * j / 8.0;
      const ProductPoint q = F(HPoint::from_vec3(t.boundary_point(s, th)));
      EXPECT_LE((q.w - t.profile().curve()->point(s)).norm(), 1e-10);
      EXPECT_NEAR(std::atan2(q.u[1], q.u[0]), std::remainder(th, 2.0 * std::numbers::pi), 1e-12);
    }
  }
}
