#include "heischar/convex_geometry.hpp"

#include <fmt/core.h>

#include <cmath>
#include <numbers>

namespace heischar {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

}  // namespace

RayHit radial_boundary(const Profile& profile, const Vec2& A, const Vec2& direction, int march_steps) {
  const PlanarField& u = profile.implicit();
  if (!(u.value(A) < 0.0)) throw DomainError("ray origin is not inside the profile");
  const Vec2 d = direction.normalized();
  const double cap = 2.0 * profile.extent().diameter();
  const double dtau = cap / march_steps;
  RayHit hit;
  double prev = u.value(A);
  std::optional<std::pair<double, double>> bracket;
  for (int k = 1; k <= march_steps; ++k) {
    const double tau = k * dtau;
    const double v = u.value(A + tau * d);
    if ((prev < 0.0) != (v < 0.0)) {
      ++hit.crossings;
      if (!bracket) bracket = {tau - dtau, tau};
    }
    prev = v;
  }
  if (!bracket) throw DomainError("ray from A never leaves the profile within its bounding box");
  if (hit.crossings > 1) {
    throw DomainError(fmt::format("ray from A crosses the boundary {} times; profile is not convex",
                                  hit.crossings));
  }
  auto [lo, hi] = *bracket;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (u.value(A + mid * d) < 0.0 ? lo : hi) = mid;
  }
  hit.tau = 0.5 * (lo + hi);
  return hit;
}

ConvexityCertificate convexity_certificate(const Profile& profile, int samples) {
  if (!profile.has_curve()) throw ValidationError("convexity check needs a boundary curve");
  const auto& curve = *profile.curve();
  std::vector<Vec2> pts(samples);
  for (int i = 0; i < samples; ++i) pts[i] = curve.point(static_cast<double>(i) / samples);
  ConvexityCertificate c;
  c.samples = samples;
  c.min_turn = std::numeric_limits<double>::infinity();
  c.max_turn = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Vec2 e1 = pts[(i + 1) % samples] - pts[i];
    const Vec2 e2 = pts[(i + 2) % samples] - pts[(i + 1) % samples];
    const double turn = cross2(e1, e2) / (e1.norm() * e2.norm());
    c.min_turn = std::min(c.min_turn, turn);
    c.max_turn = std::max(c.max_turn, turn);
  }
  // Straight pieces give turns at rounding level; only a definite sign change counts.
  c.convex = c.min_turn > -1e-9 && c.max_turn > 0.0;
  return c;
}

ConvexProfile ConvexProfile::make(Profile base, std::optional<Vec2> A, std::optional<double> r) {
  if (!base.has_curve()) throw ValidationError("convex profile needs a boundary curve");
  ConvexProfile cp(std::move(base));
  cp.convexity_ = convexity_certificate(cp.base_);
  if (!cp.convexity_.convex) {
    throw ValidationError(fmt::format("profile '{}' is not convex (boundary turn ranges over [{}, {}])",
                                      cp.base_.kind(), cp.convexity_.min_turn, cp.convexity_.max_turn));
  }
  const auto& curve = *cp.base_.curve();
  constexpr int n = 4096;
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = curve.point(static_cast<double>(i) / n);
  if (A) {
    cp.A_ = *A;
  } else {
    double area = 0.0;
    Vec2 c = Vec2::Zero();
    for (int i = 0; i < n; ++i) {
      const Vec2& p = pts[i];
      const Vec2& q = pts[(i + 1) % n];
      const double w = cross2(p, q);
      area += w;
      c += w * (p + q);
    }
    cp.A_ = c / (3.0 * area);
  }
  if (!(cp.base_.implicit().value(cp.A_) < 0.0)) {
    throw ValidationError(fmt::format("centre ({}, {}) is not inside the profile", cp.A_[0], cp.A_[1]));
  }
  double dist = std::numeric_limits<double>::infinity();
  double max_grad = 0.0;
  for (const Vec2& p : pts) {
    dist = std::min(dist, (p - cp.A_).norm());
    max_grad = std::max(max_grad, cp.base_.implicit().gradient(p).norm());
  }
  cp.boundary_distance_ = dist;
  cp.boundary_tol_ = 1e-8 * std::max(1.0, max_grad * cp.base_.extent().diameter());
  cp.r_ = r.value_or(0.5 * dist);
  if (!(cp.r_ > 0.0) || !(cp.r_ < dist)) {
    throw ValidationError(fmt::format("radius {} must lie in (0, {}) so that D(A, r) stays inside U", cp.r_, dist));
  }
  return cp;
}

double ConvexProfile::tau(const Vec2& unit_direction) const {
  return radial_boundary(base_, A_, unit_direction).tau;
}

double ConvexProfile::radial_extent(const Vec2& omega) const {
  const Vec2 d = omega - A_;
  if (std::abs(d.norm() - r_) > 1e-9 * r_) throw DomainError("omega is not on the circle S^1(A, r)");
  return tau(d / d.norm()) / r_;
}

Vec2 ConvexProfile::g_map(const Vec2& X) const {
  const Vec2 d = X - A_;
  if (d.norm() == 0.0) throw DomainError("g is undefined at A");
  if (std::abs(base_.implicit().value(X)) > boundary_tol_) throw DomainError("point is not on the boundary");
  return A_ + r_ * d / d.norm();
}

Vec2 ConvexProfile::g_inv(const Vec2& omega) const {
  return A_ + radial_extent(omega) * (omega - A_);
}

Vec2 ConvexProfile::G_map(const Vec2& Y) const {
  const Vec2 d = Y - A_;
  const double len = d.norm();
  if (len > r_ * (1.0 + 1e-12)) throw DomainError("point lies outside the disc D(A, r)");
  if (len == 0.0) return A_;
  return A_ + (tau(d / len) / r_) * d;
}

Vec2 ConvexProfile::radial_projection(const Vec2& X) const {
  const Vec2 d = X - A_;
  const double len = d.norm();
  if (len == 0.0) throw DomainError("radial projection is undefined at A");
  return A_ + tau(d / len) * d / len;
}

Vec2 ConvexProfile::H_map(const Vec2& X) const {
  if (base_.implicit().value(X) > boundary_tol_) throw DomainError("point lies outside K");
  const Vec2 d = X - A_;
  const double len = d.norm();
  if (len == 0.0) return A_;
  return A_ + (r_ / tau(d / len)) * d;
}

InjectivityCheck g_injectivity(const ConvexProfile& cp, int samples) {
  const auto& curve = *cp.base().curve();
  InjectivityCheck out;
  out.samples = samples;
  std::vector<double> angle(samples);
  for (int i = 0; i < samples; ++i) {
    const Vec2 w = cp.g_map(curve.point(static_cast<double>(i) / samples)) - cp.A();
    angle[i] = std::atan2(w[1], w[0]);
  }
  double total = 0.0;
  out.min_separation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double gap = angle[(i + 1) % samples] - angle[i];
    gap -= kTwoPi * std::floor(gap / kTwoPi);
    if (gap > std::numbers::pi) gap -= kTwoPi;
    total += gap;
    out.min_separation = std::min(out.min_separation, gap);
  }
  out.separation_ratio = out.min_separation / (kTwoPi / samples);
  out.ok = out.min_separation > 0.0 && std::abs(total - kTwoPi) < 1e-9;
  return out;
}

double radial_lipschitz(const ConvexProfile& cp, int samples) {
  std::vector<Vec2> omega(samples);
  std::vector<double> a(samples);
  for (int i = 0; i < samples; ++i) {
    const double ang = kTwoPi * i / samples;
    omega[i] = cp.A() + cp.r() * Vec2(std::cos(ang), std::sin(ang));
    a[i] = cp.radial_extent(omega[i]);
  }
  double L = 0.0;
  for (int i = 0; i < samples; ++i) {
    const int j = (i + 1) % samples;
    L = std::max(L, std::abs(a[j] - a[i]) / (omega[j] - omega[i]).norm());
  }
  return L;
}

}  // namespace heischar
