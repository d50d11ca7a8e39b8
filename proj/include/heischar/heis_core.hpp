#pragma once

// Group structure, dilations, gauge, horizontal frame, contact form and
// Siegel identification of the Heisenberg group H^n. Ambient coordinate
// vectors are ordered (x_1..x_n, y_1..y_n, t).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "heischar/error.hpp"
#include "heischar/scalar_field.hpp"

namespace heischar {

/// A point (z, t) of H^n with z_j = x_j + i y_j.
class HPoint {
 public:
  /// Origin of H^1.
  HPoint() : x_(1, 0.0), y_(1, 0.0), t_(0.0) {}
  HPoint(std::vector<double> x, std::vector<double> y, double t);
  HPoint(double x, double y, double t) : HPoint(std::vector{x}, std::vector{y}, t) {}

  static HPoint origin(int n = 1);
  static HPoint from_vec3(const Vec3& v) { return {v[0], v[1], v[2]}; }

  int dim() const { return static_cast<int>(x_.size()); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  double t() const { return t_; }
  double x(int j) const { return x_[j]; }
  double y(int j) const { return y_[j]; }
  std::complex<double> z(int j) const { return {x_[j], y_[j]}; }
  double z_norm_sq() const;

  /// Requires n = 1.
  Vec3 to_vec3() const;
  Eigen::VectorXd coords() const;

  friend bool operator==(const HPoint&, const HPoint&) = default;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  double t_;
};

/// Tangent vector in coordinates (v_x, v_y, v_t) attached to a base point.
struct TangentVector {
  HPoint base;
  std::vector<double> vx;
  std::vector<double> vy;
  double vt = 0.0;

  TangentVector(HPoint base_point, std::vector<double> vx_, std::vector<double> vy_, double vt_);
  TangentVector(const HPoint& base_point, const Vec3& v)
      : TangentVector(base_point, {v[0]}, {v[1]}, v[2]) {}

  Eigen::VectorXd coords() const;
  Vec3 to_vec3() const;
};

/// Coefficients (alpha_j, beta_j) on the frame (X_j, Y_j) at a base point.
struct HorizontalVector {
  HPoint base;
  std::vector<double> alpha;
  std::vector<double> beta;

  HorizontalVector(HPoint base_point, std::vector<double> a, std::vector<double> b);
  HorizontalVector(double a, double b) : HorizontalVector(HPoint{}, {a}, {b}) {}

  double norm() const;
  TangentVector to_tangent() const;
};

struct Frame {
  std::vector<TangentVector> X;
  std::vector<TangentVector> Y;
  TangentVector T;
};

/// Homogeneous dimension 2n + 2.
constexpr int homogeneous_dimension(int n) { return 2 * n + 2; }

/// p . q with p supplying the primed variables:
/// (x + x', y + y', t + t' + 2(<x, y'> - <x', y>)).
HPoint group_mul(const HPoint& p, const HPoint& q);
HPoint group_inv(const HPoint& p);
HPoint dilate(double lambda, const HPoint& p);
/// Differential of the dilation in ambient coordinates (diagonal).
Eigen::MatrixXd dilation_jacobian(double lambda, int n);

/// Koranyi gauge (sum |z_j|^4 + t^2)^(1/4).
double gauge(const HPoint& p);
/// rho(p . q^-1). Right-invariant: distance(p.g, q.g) = distance(p, q).
double distance(const HPoint& p, const HPoint& q);

Frame frame_at(const HPoint& p);
/// Differential of left translation by g applied to v.
TangentVector left_translate_push(const HPoint& g, const TangentVector& v);
/// theta_0 = dt + sum_j (2 x_j dy_j - 2 y_j dx_j).
double contact_form(const HPoint& p, const TangentVector& v);
/// Complex structure on the horizontal bundle: J X_j = Y_j, J Y_j = -X_j.
HorizontalVector j_map(const HorizontalVector& h);

/// (X_j f, Y_j f) from the Euclidean gradient, ordered (x.., y.., t).
HorizontalVector horizontal_gradient(const HPoint& p, std::span<const double> euclidean_gradient);
HorizontalVector horizontal_gradient(const AmbientField& f, const HPoint& p);
/// Kohn-Spencer laplacian -sum_j (X_j^2 + Y_j^2) f from the Euclidean Hessian.
double sublaplacian(const HPoint& p, const Eigen::MatrixXd& hessian);
double sublaplacian(const AmbientField& f, const HPoint& p);

using SiegelPoint = std::vector<std::complex<double>>;
/// (t + i|z|^2, z_1, ..., z_n), a point of the Siegel boundary M_n.
SiegelPoint siegel_embed(const HPoint& p);
/// Holomorphic affine action of H^n on C^{n+1}.
SiegelPoint siegel_action(const HPoint& g, const SiegelPoint& xi);
/// Im xi_0 - sum |xi_j|^2; zero exactly on M_n.
double siegel_defect(const SiegelPoint& xi);

/// Allocation-free H^1 kernels on ambient 3-vectors, used by the hot loops.
namespace h1 {

inline Vec3 mul(const Vec3& p, const Vec3& q) {
  return {p[0] + q[0], p[1] + q[1], p[2] + q[2] + 2.0 * (q[0] * p[1] - p[0] * q[1])};
}
inline Vec3 inv(const Vec3& p) { return -p; }
inline Vec3 dilate(double lambda, const Vec3& p) {
  return {lambda * p[0], lambda * p[1], lambda * lambda * p[2]};
}
inline double gauge(const Vec3& p) {
  const double r2 = p[0] * p[0] + p[1] * p[1];
  return std::pow(r2 * r2 + p[2] * p[2], 0.25);
}
inline double distance(const Vec3& p, const Vec3& q) { return gauge(mul(p, inv(q))); }

inline Vec3 X(const Vec3& p) { return {1.0, 0.0, 2.0 * p[1]}; }
inline Vec3 Y(const Vec3& p) { return {0.0, 1.0, -2.0 * p[0]}; }
inline Vec3 T() { return {0.0, 0.0, 1.0}; }
/// Components of theta_0 in (dx, dy, dt).
inline Vec3 contact_covector(const Vec3& p) { return {-2.0 * p[1], 2.0 * p[0], 1.0}; }

inline Vec2 horizontal(const Vec3& grad, const Vec3& p) {
  return {grad[0] + 2.0 * p[1] * grad[2], grad[1] - 2.0 * p[0] * grad[2]};
}

/// -(X^2 + Y^2) f expressed through the Euclidean Hessian.
inline double sublaplacian(const Mat3& H, const Vec3& p) {
  const double x = p[0], y = p[1];
  return -(H(0, 0) + H(1, 1) + 4.0 * y * H(0, 2) - 4.0 * x * H(1, 2) +
           4.0 * (x * x + y * y) * H(2, 2));
}

}  // namespace h1

}  // namespace heischar
