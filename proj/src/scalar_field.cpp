#include "heischar/fields.hpp"

#include <fmt/core.h>

#include <cmath>

namespace heischar {

AmbientField compose_profile(const PlanarField& u) {
  const Box<2>& pb = u.box();
  // |z|^2 ranges over [0, b_max]; t over the profile's first coordinate.
  const double r = std::sqrt(std::max(pb.hi[1], 0.0));
  Box<3> box{Vec3(-r, -r, pb.lo[0]), Vec3(r, r, pb.hi[0])};

  auto value = [u](const Vec3& p) {
    return u.value(Vec2(p[2], p[0] * p[0] + p[1] * p[1]));
  };
  auto gradient = [u](const Vec3& p) {
    const Vec2 g = u.gradient(Vec2(p[2], p[0] * p[0] + p[1] * p[1]));
    return Vec3(2.0 * p[0] * g[1], 2.0 * p[1] * g[1], g[0]);
  };
  auto hessian = [u](const Vec3& p) {
    const Vec2 w(p[2], p[0] * p[0] + p[1] * p[1]);
    const Vec2 g = u.gradient(w);
    const Eigen::Matrix2d h = u.hessian(w);
    const double x = p[0], y = p[1];
    Mat3 H;
    H(0, 0) = 2.0 * g[1] + 4.0 * x * x * h(1, 1);
    H(1, 1) = 2.0 * g[1] + 4.0 * y * y * h(1, 1);
    H(2, 2) = h(0, 0);
    H(0, 1) = H(1, 0) = 4.0 * x * y * h(1, 1);
    H(0, 2) = H(2, 0) = 2.0 * x * h(0, 1);
    H(1, 2) = H(2, 1) = 2.0 * y * h(0, 1);
    return H;
  };
  return AmbientField(value, box, gradient, hessian, u.fd_policy());
}

AmbientField scale_by(const AmbientField& h, const AmbientField& psi) {
  Box<3> box{psi.box().lo.cwiseMax(h.box().lo), psi.box().hi.cwiseMin(h.box().hi)};
  auto value = [h, psi](const Vec3& p) { return h.value(p) * psi.value(p); };
  if (!h.has_analytic_gradient() || !psi.has_analytic_gradient()) {
    return AmbientField(value, box, {}, {}, psi.fd_policy());
  }
  auto gradient = [h, psi](const Vec3& p) {
    return Vec3(h.value(p) * psi.gradient(p) + psi.value(p) * h.gradient(p));
  };
  AmbientField::HessianFn hessian;
  if (h.has_analytic_hessian() && psi.has_analytic_hessian()) {
    hessian = [h, psi](const Vec3& p) {
      const Vec3 gh = h.gradient(p), gp = psi.gradient(p);
      return Mat3(h.value(p) * psi.hessian(p) + psi.value(p) * h.hessian(p) +
                  gh * gp.transpose() + gp * gh.transpose());
    };
  }
  return AmbientField(value, box, gradient, hessian, psi.fd_policy());
}

DefiningCheck validate_defining(const AmbientField& f, std::span<const Vec3> samples, double tol,
                                double scale) {
  if (samples.empty()) throw ValidationError("validate_defining: empty sample list");
  if (!(tol > 0.0)) throw ValidationError("validate_defining: tolerance must be positive");
  DefiningCheck out;
  out.tol = tol;
  out.min_gradient_norm = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = f.value(samples[i]);
    if (!(std::abs(v) <= tol * scale)) {
      throw DomainError(fmt::format("validate_defining: sample {} is off the zero set (|f| = {})", i,
                                    std::abs(v)));
    }
    const double g = f.gradient(samples[i]).norm();
    if (g < out.min_gradient_norm) {
      out.min_gradient_norm = g;
      out.argmin = i;
    }
    if (!(g > tol)) out.failures.push_back(i);
  }
  out.ok = out.failures.empty();
  return out;
}

}  // namespace heischar
