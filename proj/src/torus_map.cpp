#include "heischar/torus_map.hpp"

#include <fmt/core.h>

#include <cmath>

namespace heischar {
namespace {

Vec3 off_center(const HPoint& p, double tol_center) {
  if (p.dim() != 1) throw DimensionMismatch("torus map is defined on H^1 only");
  const Vec3 v = p.to_vec3();
  const double r = std::hypot(v[0], v[1]);
  if (!(r > tol_center)) {
    throw DomainError(fmt::format("point ({}, {}, {}) lies on or near the center", v[0], v[1], v[2]));
  }
  return v;
}

}  // namespace

ProductPoint ProductPoint::make(const Vec2& w, const Vec2& u) {
  if (!w.allFinite() || !u.allFinite()) throw DomainError("product point must be finite");
  if (!(w[1] > 0.0)) throw DomainError("product point needs a positive |z|^2-coordinate");
  if (std::abs(u.norm() - 1.0) > 1e-12) throw DomainError("product point direction must be a unit vector");
  return {w, u};
}

ProductPoint F(const HPoint& p, double tol_center) {
  const Vec3 v = off_center(p, tol_center);
  const double r = std::hypot(v[0], v[1]);
  return {Vec2(v[2], v[0] * v[0] + v[1] * v[1]), Vec2(v[0] / r, v[1] / r)};
}

HPoint F_inv(const ProductPoint& q) {
  const ProductPoint ok = ProductPoint::make(q.w, q.u);
  const double s = std::sqrt(ok.w[1]);
  return {s * ok.u[0], s * ok.u[1], ok.w[0]};
}

Eigen::Matrix<double, 4, 3> TF_matrix(const HPoint& p, double tol_center) {
  const Vec3 v = off_center(p, tol_center);
  const double x = v[0], y = v[1];
  const double r2 = x * x + y * y;
  const double r = std::sqrt(r2);
  const double r3 = r2 * r;
  Eigen::Matrix<double, 4, 3> J;
  J << 0.0, 0.0, 1.0,
       2.0 * x, 2.0 * y, 0.0,
       1.0 / r - x * x / r3, -x * y / r3, 0.0,
       -x * y / r3, 1.0 / r - y * y / r3, 0.0;
  return J;
}

ProductTangent TF(const HPoint& p, const TangentVector& v, double tol_center) {
  if (v.base.dim() != p.dim() || v.vx.size() != 1) {
    throw DimensionMismatch("tangent vector and point dimensions differ");
  }
  const Eigen::Vector4d out = TF_matrix(p, tol_center) * v.to_vec3();
  return {out.head<2>(), out.tail<2>()};
}

Mat3 TF_intrinsic(const HPoint& p, double tol_center) {
  const Eigen::Matrix<double, 4, 3> J = TF_matrix(p, tol_center);
  const ProductPoint q = F(p, tol_center);
  const Vec2 perp(-q.u[1], q.u[0]);
  Mat3 M;
  M.topRows<2>() = J.topRows<2>();
  M.row(2) = perp.transpose() * J.bottomRows<2>();
  return M;
}

Eigen::Matrix<double, 4, 3> F_jacobian_fd(const HPoint& p, double step) {
  const Vec3 v = p.to_vec3();
  Eigen::Matrix<double, 4, 3> J;
  for (int i = 0; i < 3; ++i) {
    Vec3 a = v, b = v;
    a[i] += step;
    b[i] -= step;
    const ProductPoint fa = F(HPoint::from_vec3(a));
    const ProductPoint fb = F(HPoint::from_vec3(b));
    Eigen::Vector4d da;
    da << fa.w - fb.w, fa.u - fb.u;
    J.col(i) = da / (2.0 * step);
  }
  return J;
}

Vec3 TF_singular_values(const HPoint& p, double tol_center) {
  return Eigen::JacobiSVD<Mat3>(TF_intrinsic(p, tol_center)).singularValues();
}

}  // namespace heischar
