#pragma once

// Homeomorphism between a compact convex profile closure K and a closed
// disc D(A, r) built from the radial boundary function a(omega).

#include <optional>
#include <vector>

#include "heischar/profiles.hpp"
#include "heischar/scalar_field.hpp"

namespace heischar {

struct RayHit {
  double tau = 0.0;   // boundary at A + tau * direction
  int crossings = 0;  // sign changes of the implicit field along the marched ray
};

/// Marches A + tau d (|d| = 1) for tau in (0, cap] and bisects the first exit to
/// 1e-12 in tau. Throws DomainError when A is not interior, when the ray never
/// exits, or when it exits more than once (the region is not star-shaped from A).
RayHit radial_boundary(const Profile& profile, const Vec2& A, const Vec2& direction, int march_steps = 1024);

struct ConvexityCertificate {
  int samples = 0;
  /// Normalized cross products of consecutive boundary chords, extremes.
  double min_turn = 0.0;
  double max_turn = 0.0;
  bool convex = false;
};

/// Turn signs of the sampled boundary polygon.
ConvexityCertificate convexity_certificate(const Profile& profile, int samples = 2048);

class ConvexProfile {
 public:
  /// Defaults: A = area centroid of the boundary curve, r = half the distance
  /// from A to the boundary. Throws ValidationError for a missing curve, a
  /// non-convex boundary, A outside U, or D(A, r) not inside U.
  static ConvexProfile make(Profile base, std::optional<Vec2> A = {}, std::optional<double> r = {});

  const Profile& base() const { return base_; }
  const Vec2& A() const { return A_; }
  double r() const { return r_; }
  /// Distance from A to the sampled boundary.
  double boundary_distance() const { return boundary_distance_; }
  const ConvexityCertificate& convexity() const { return convexity_; }
  /// Tolerance on |u| for points declared on the boundary.
  double boundary_tol() const { return boundary_tol_; }

  /// a(omega) with A + a(omega)(omega - A) on the boundary.
  double radial_extent(const Vec2& omega) const;
  /// A + r (X - A) / |X - A| for X on the boundary.
  Vec2 g_map(const Vec2& X) const;
  /// A + a(omega)(omega - A) for omega on the circle S^1(A, r).
  Vec2 g_inv(const Vec2& omega) const;
  /// Disc to K.
  Vec2 G_map(const Vec2& Y) const;
  /// K to disc, with the radial projection from A onto the boundary.
  Vec2 H_map(const Vec2& X) const;
  /// Radial projection of X != A onto the boundary.
  Vec2 radial_projection(const Vec2& X) const;

 private:
  ConvexProfile(Profile base) : base_(std::move(base)) {}
  double tau(const Vec2& unit_direction) const;

  Profile base_;
  Vec2 A_ = Vec2::Zero();
  double r_ = 0.0;
  double boundary_distance_ = 0.0;
  double boundary_tol_ = 0.0;
  ConvexityCertificate convexity_;
};

struct InjectivityCheck {
  bool ok = false;
  int samples = 0;
  /// Smallest angular gap between images of consecutive samples.
  double min_separation = 0.0;
  /// min_separation divided by the uniform spacing 2 pi / samples.
  double separation_ratio = 0.0;
};

/// Images of boundary samples gamma(i / n) under g must wind once around A with
/// strictly increasing angle.
InjectivityCheck g_injectivity(const ConvexProfile& cp, int samples = 4096);

/// Largest |a(omega_1) - a(omega_2)| / |omega_1 - omega_2| over consecutive
/// samples of the circle.
double radial_lipschitz(const ConvexProfile& cp, int samples = 2048);

}  // namespace heischar
