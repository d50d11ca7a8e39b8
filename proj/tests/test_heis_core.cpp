#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "heischar/heis_core.hpp"

using namespace heischar;

namespace {

HPoint random_point(std::mt19937_64& rng, int n = 1, double range = 2.0) {
  std::uniform_real_distribution<double> u(-range, range);
  std::vector<double> x(n), y(n);
  for (int j = 0; j < n; ++j) {
    x[j] = u(rng);
    y[j] = u(rng);
  }
  return {x, y, u(rng)};
}

double coord_diff(const HPoint& a, const HPoint& b) { return (a.coords() - b.coords()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Group, MulMatchesHandComputation) {
  // p supplies the primed variables: t + t' + 2(x y' - x' y).
  const HPoint p(1.0, 0.0, 0.0);
  const HPoint q(0.0, 1.0, 0.0);
  EXPECT_EQ(group_mul(p, q), HPoint(1.0, 1.0, -2.0));
  EXPECT_EQ(group_mul(q, p), HPoint(1.0, 1.0, 2.0));
}

TEST(Group, Axioms) {
  std::mt19937_64 rng(11);
  for (int n : {1, 2}) {
    for (int k = 0; k < 500; ++k) {
      const HPoint a = random_point(rng, n), b = random_point(rng, n), c = random_point(rng, n);
      EXPECT_LE(coord_diff(group_mul(group_mul(a, b), c), group_mul(a, group_mul(b, c))), 1e-12);
      EXPECT_LE(coord_diff(group_mul(a, HPoint::origin(n)), a), 0.0);
      EXPECT_LE(coord_diff(group_mul(HPoint::origin(n), a), a), 0.0);
      EXPECT_LE(coord_diff(group_mul(a, group_inv(a)), HPoint::origin(n)), 1e-12);
      EXPECT_LE(coord_diff(group_mul(group_inv(a), a), HPoint::origin(n)), 1e-12);
    }
  }
}

TEST(Group, InverseNegates) {
  EXPECT_EQ(group_inv(HPoint(1.0, -2.0, 3.0)), HPoint(-1.0, 2.0, -3.0));
}

TEST(Group, DimensionMismatchThrows) {
  EXPECT_THROW(group_mul(HPoint::origin(1), HPoint::origin(2)), DimensionMismatch);
}

TEST(Group, RejectsNonFiniteCoordinates) {
  EXPECT_THROW(HPoint(std::nan(""), 0.0, 0.0), ValidationError);
  EXPECT_THROW(HPoint(0.0, 0.0, INFINITY), ValidationError);
}

TEST(Dilation, IsAutomorphism) {
  std::mt19937_64 rng(12);
  for (double lambda : {0.5, 2.0, 3.0}) {
    for (int k = 0; k < 200; ++k) {
      const HPoint a = random_point(rng), b = random_point(rng);
      const HPoint lhs = dilate(lambda, group_mul(a, b));
      const HPoint rhs = group_mul(dilate(lambda, a), dilate(lambda, b));
      EXPECT_LE(coord_diff(lhs, rhs), 1e-12 * lambda * lambda * 10.0);
    }
  }
}

TEST(Dilation, JacobianDeterminantIsLambdaToQ) {
  EXPECT_EQ(homogeneous_dimension(1), 4);
  EXPECT_EQ(homogeneous_dimension(2), 6);
  EXPECT_NEAR(dilation_jacobian(3.0, 1).determinant(), 81.0, 1e-12);
  EXPECT_NEAR(dilation_jacobian(2.0, 2).determinant(), 64.0, 1e-12);
}

TEST(Dilation, RejectsNonPositiveFactor) {
  EXPECT_THROW(dilate(0.0, HPoint(1.0, 1.0, 1.0)), DomainError);
  EXPECT_THROW(dilate(-1.0, HPoint(1.0, 1.0, 1.0)), DomainError);
}

TEST(Gauge, FrozenValues) {
  EXPECT_DOUBLE_EQ(gauge(HPoint(1.0, 0.0, 0.0)), 1.0);
  EXPECT_DOUBLE_EQ(gauge(HPoint(0.0, 0.0, 1.0)), 1.0);
  EXPECT_NEAR(gauge(HPoint(1.0, 1.0, 2.0)), std::pow(8.0, 0.25), 1e-15);
}

TEST(Gauge, Homogeneous) {
  std::mt19937_64 rng(13);
  for (double lambda : {0.5, 2.0, 3.0, 7.5}) {
    for (int k = 0; k < 200; ++k) {
      const HPoint a = random_point(rng);
      EXPECT_NEAR(gauge(dilate(lambda, a)), lambda * gauge(a), 1e-12 * lambda * gauge(a));
    }
  }
}

TEST(Distance, RightInvariant) {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 300; ++k) {
    const HPoint p = random_point(rng), q = random_point(rng), g = random_point(rng);
    const double d = distance(p, q);
    EXPECT_NEAR(distance(group_mul(p, g), group_mul(q, g)), d, 1e-12 * std::max(1.0, d));
  }
}

TEST(Distance, NotLeftInvariantCounterexample) {
  const HPoint g(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), q = HPoint::origin();
  EXPECT_DOUBLE_EQ(distance(p, q), 1.0);
  EXPECT_NEAR(distance(group_mul(g, p), group_mul(g, q)), std::pow(17.0, 0.25), 1e-15);
}

TEST(Distance, SymmetricAndHomogeneous) {
  std::mt19937_64 rng(15);
  for (int k = 0; k < 200; ++k) {
    const HPoint p = random_point(rng), q = random_point(rng);
    EXPECT_NEAR(distance(p, q), distance(q, p), 1e-12);
    EXPECT_NEAR(distance(dilate(2.0, p), dilate(2.0, q)), 2.0 * distance(p, q), 1e-11);
  }
}

TEST(Frame, ClosedForm) {
  const Frame f = frame_at(HPoint(0.5, -1.5, 2.0));
  EXPECT_EQ(f.X[0].to_vec3(), Vec3(1.0, 0.0, -3.0));
  EXPECT_EQ(f.Y[0].to_vec3(), Vec3(0.0, 1.0, -1.0));
  EXPECT_EQ(f.T.to_vec3(), Vec3(0.0, 0.0, 1.0));
}

TEST(Frame, LeftInvariantClosedForm) {
  std::mt19937_64 rng(16);
  for (int k = 0; k < 200; ++k) {
    const HPoint g = random_point(rng), p = random_point(rng);
    const Frame at_p = frame_at(p);
    const Frame at_gp = frame_at(group_mul(g, p));
    EXPECT_LE((left_translate_push(g, at_p.X[0]).to_vec3() - at_gp.X[0].to_vec3()).norm(), 1e-12);
    EXPECT_LE((left_translate_push(g, at_p.Y[0]).to_vec3() - at_gp.Y[0].to_vec3()).norm(), 1e-12);
    EXPECT_LE((left_translate_push(g, at_p.T).to_vec3() - at_gp.T.to_vec3()).norm(), 0.0);
  }
}

TEST(Frame, LeftInvariantFiniteDifference) {
  std::mt19937_64 rng(17);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const Vec3 g = random_point(rng).to_vec3(), p = random_point(rng).to_vec3();
    for (const Vec3& v : {h1::X(p), h1::Y(p)}) {
      const Vec3 moved = (h1::mul(g, p + h * v) - h1::mul(g, p - h * v)) / (2.0 * h);
      const Vec3 expected = v[0] == 1.0 ? h1::X(h1::mul(g, p)) : h1::Y(h1::mul(g, p));
      EXPECT_LE((moved - expected).norm(), 1e-8);
    }
  }
}

TEST(ContactForm, AnnihilatesHorizontalFrame) {
  std::mt19937_64 rng(18);
  for (int k = 0; k < 100; ++k) {
    const HPoint p = random_point(rng);
    const Frame f = frame_at(p);
    EXPECT_EQ(contact_form(p, f.X[0]), 0.0);
    EXPECT_EQ(contact_form(p, f.Y[0]), 0.0);
    EXPECT_EQ(contact_form(p, f.T), 1.0);
  }
}

TEST(ContactForm, RejectsForeignBasePoint) {
  const HPoint p(1.0, 0.0, 0.0);
  const TangentVector v(HPoint(0.0, 0.0, 0.0), Vec3(1.0, 0.0, 0.0));
  EXPECT_THROW(contact_form(p, v), DomainError);
}

TEST(ComplexStructure, RotatesFrame) {
  const HorizontalVector x(1.0, 0.0);
  const HorizontalVector jx = j_map(x);
  EXPECT_EQ(jx.alpha[0], 0.0);
  EXPECT_EQ(jx.beta[0], 1.0);
  const HorizontalVector jjx = j_map(jx);
  EXPECT_EQ(jjx.alpha[0], -1.0);
  EXPECT_EQ(jjx.beta[0], 0.0);
}

TEST(HorizontalGradient, FromEuclideanGradient) {
  // f = t: X f = 2y, Y f = -2x.
  const HPoint p(0.5, 2.0, -1.0);
  const std::vector<double> grad{0.0, 0.0, 1.0};
  const HorizontalVector h = horizontal_gradient(p, grad);
  EXPECT_EQ(h.alpha[0], 4.0);
  EXPECT_EQ(h.beta[0], -1.0);
}

TEST(Sublaplacian, GaugeFourthPower) {
  // f = |z|^4 + t^2 gives -(X^2 + Y^2) f = -24 |z|^2.
  const AmbientField f([](const Vec3& p) {
                         const double r2 = p[0] * p[0] + p[1] * p[1];
                         return r2 * r2 + p[2] * p[2];
                       },
                       Box<3>{Vec3::Constant(-5.0), Vec3::Constant(5.0)});
  std::mt19937_64 rng(19);
  for (int k = 0; k < 50; ++k) {
    const HPoint p = random_point(rng, 1, 1.5);
    EXPECT_NEAR(sublaplacian(f, p), -24.0 * p.z_norm_sq(), 1e-4 * std::max(1.0, p.z_norm_sq()));
  }
}

TEST(Sublaplacian, MatchesNestedVectorFields) {
  // Independent route: apply X and Y as directional derivatives twice.
  auto f = [](const Vec3& p) { return std::sin(p[0]) * std::cos(2.0 * p[1]) + p[2] * p[2] * p[0]; };
  auto Xf = [&](const Vec3& p) {
    const double h = 1e-5;
    const Vec3 v = h1::X(p);
    return (f(p + h * v) - f(p - h * v)) / (2.0 * h);
  };
  auto Yf = [&](const Vec3& p) {
    const double h = 1e-5;
    const Vec3 v = h1::Y(p);
    return (f(p + h * v) - f(p - h * v)) / (2.0 * h);
  };
  const double h = 1e-4;
  const Vec3 p(0.3, -0.4, 0.7);
  const double xx = (Xf(p + h * h1::X(p)) - Xf(p - h * h1::X(p))) / (2.0 * h);
  const double yy = (Yf(p + h * h1::Y(p)) - Yf(p - h * h1::Y(p))) / (2.0 * h);
  const AmbientField field(f, Box<3>{Vec3::Constant(-2.0), Vec3::Constant(2.0)});
  EXPECT_NEAR(h1::sublaplacian(field.hessian(p), p), -(xx + yy), 1e-5);
}

TEST(Siegel, EmbeddingLandsOnBoundary) {
  std::mt19937_64 rng(20);
  for (int n : {1, 2}) {
    for (int k = 0; k < 100; ++k) EXPECT_NEAR(siegel_defect(siegel_embed(random_point(rng, n))), 0.0, 1e-12);
  }
}

TEST(Siegel, ActionIsEquivariant) {
  std::mt19937_64 rng(21);
  for (int n : {1, 2}) {
    for (int k = 0; k < 300; ++k) {
      const HPoint g = random_point(rng, n), p = random_point(rng, n);
      const SiegelPoint lhs = siegel_embed(group_mul(g, p));
      const SiegelPoint rhs = siegel_action(g, siegel_embed(p));
      for (std::size_t j = 0; j < lhs.size(); ++j) EXPECT_LE(std::abs(lhs[j] - rhs[j]), 1e-12);
    }
  }
}

TEST(Siegel, CrFunctionIsAnnihilated) {
  // Zbar = d/dzbar - i z d/dt applied to w = t + i|z|^2 by central differences.
  auto w = [](const Vec3& p) { return std::complex<double>(p[2], p[0] * p[0] + p[1] * p[1]); };
  std::mt19937_64 rng(22);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const Vec3 p = random_point(rng).to_vec3();
    auto d = [&](int i) {
      Vec3 a = p, b = p;
      a[i] += h;
      b[i] -= h;
      return (w(a) - w(b)) / (2.0 * h);
    };
    const std::complex<double> z(p[0], p[1]);
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> zbar_w = 0.5 * (d(0) + i * d(1)) - i * z * d(2);
    EXPECT_LE(std::abs(zbar_w), 1e-9);
  }
}
