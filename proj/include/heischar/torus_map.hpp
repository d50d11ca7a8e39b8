#pragma once

// F(z, t) = (w(z, t), z / |z|) from H^1 minus the center onto the open upper
// half-plane times the circle, its inverse, and its tangent map.

#include <Eigen/Dense>

#include "heischar/heis_core.hpp"
#include "heischar/scalar_field.hpp"

namespace heischar {

inline constexpr double kTolCenter = 1e-12;

/// (w, u): w = (t-coordinate, |z|^2-coordinate) with w[1] > 0, u on the unit circle.
struct ProductPoint {
  Vec2 w;
  Vec2 u;

  /// Throws DomainError if w[1] <= 0 or | |u| - 1 | > 1e-12.
  static ProductPoint make(const Vec2& w, const Vec2& u);
};

/// Image of a tangent vector: dw in R^2, du tangent to the circle at u.
struct ProductTangent {
  Vec2 dw;
  Vec2 du;
};

ProductPoint F(const HPoint& p, double tol_center = kTolCenter);
HPoint F_inv(const ProductPoint& q);
ProductTangent TF(const HPoint& p, const TangentVector& v, double tol_center = kTolCenter);

/// TF as a 4x3 matrix acting on (v_x, v_y, v_t); rows (dw_1, dw_2, du_1, du_2).
Eigen::Matrix<double, 4, 3> TF_matrix(const HPoint& p, double tol_center = kTolCenter);
/// TF in the basis (dw_1, dw_2, <du, u_perp>) of the product tangent space.
Mat3 TF_intrinsic(const HPoint& p, double tol_center = kTolCenter);
/// Central-difference Jacobian of (w, u) in ambient coordinates.
Eigen::Matrix<double, 4, 3> F_jacobian_fd(const HPoint& p, double step = 1e-6);
/// Singular values of TF_intrinsic, descending.
Vec3 TF_singular_values(const HPoint& p, double tol_center = kTolCenter);

}  // namespace heischar
