#pragma once

// Planar profiles U in the open upper half-plane and the H^1 domains built
// from them, plus generic implicitly-defined domains (Koranyi balls,
// Euclidean balls, half-spaces) and boundary meshing for both.

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heischar/fields.hpp"
#include "heischar/heis_core.hpp"
#include "heischar/scalar_field.hpp"

namespace heischar {

/// Closed parametric curve s -> gamma(s), s in [0, 1), in planar coordinates
/// (t-coordinate, |z|^2-coordinate), traversed counter-clockwise.
struct BoundaryCurve {
  std::function<Vec2(double)> point;
  std::function<Vec2(double)> tangent;  // d gamma / ds
};

using Params = std::map<std::string, double>;

/// Region U of the upper half-plane, negative inside its implicit field.
class Profile {
 public:
  /// Validates that the closure stays off {b = 0}, that curve and implicit
  /// agree, and that the curve is simple at sampling resolution.
  /// `y_min` overrides the sampled lower bound when known in closed form.
  static Profile make(std::string kind, Params params, PlanarField implicit,
                      std::optional<BoundaryCurve> curve, std::optional<double> y_min = {});

  const std::string& kind() const { return kind_; }
  const Params& params() const { return params_; }
  std::string description() const;
  const PlanarField& implicit() const { return implicit_; }
  const std::optional<BoundaryCurve>& curve() const { return curve_; }
  bool has_curve() const { return curve_.has_value(); }
  /// Lower bound of the |z|^2-coordinate over the closure of U.
  double y_min() const { return y_min_; }
  /// Bounding box of the closure (from the curve, or sampled from the implicit field).
  const Box<2>& extent() const { return extent_; }
  /// Unit outward normal of the boundary at gamma(s).
  Vec2 curve_normal(double s) const;

 private:
  Profile(std::string kind, Params params, PlanarField implicit, std::optional<BoundaryCurve> curve)
      : kind_(std::move(kind)), params_(std::move(params)), implicit_(std::move(implicit)),
        curve_(std::move(curve)) {}

  std::string kind_;
  Params params_;
  PlanarField implicit_;
  std::optional<BoundaryCurve> curve_;
  double y_min_ = 0.0;
  Box<2> extent_{};
};

Profile disc_profile(double a1, double a2, double r);
Profile ellipse_profile(double a1, double a2, double r1, double r2);
/// Convex polygon (any orientation) thickened by a disc of radius `rounding`,
/// i.e. the polygon with its corners rounded.
Profile rounded_polygon_profile(std::vector<Vec2> vertices, double rounding);
/// Disc of radius r_outer at (a1, a2) with a bite: the disc of radius r_inner
/// centred `offset` further along the t-axis removed. Not convex.
Profile crescent_profile(double a1, double a2, double r_outer, double offset, double r_inner);
/// The open unit half-disc resting on {b = 0}; always rejected.
Profile half_disc_profile();
/// Implicit-only profile from an expression in (a, b) over a search box.
Profile expression_profile(const std::string& expression, const Box<2>& box,
                           const std::map<std::string, double, std::less<>>& constants = {});

/// Parses a profile file: `let NAME = EXPR` constants, then exactly one of
/// `disc(a1, a2, r)`, `ellipse(a1, a2, r1, r2)`,
/// `polygon(rounding; x1, y1; x2, y2; ...)`, `crescent(a1, a2, R, d, r)`, or
/// `implicit EXPR` together with `box A0 A1 B0 B1`. `#` starts a comment.
Profile parse_profile_spec(std::string_view text);
Profile load_profile_spec(const std::filesystem::path& path);

/// Omega = w^{-1}(U) with defining field Psi(x, y, t) = u(t, x^2 + y^2).
class TorusDomain {
 public:
  static TorusDomain make(Profile profile);

  const Profile& profile() const { return profile_; }
  const AmbientField& psi() const { return psi_; }
  bool has_parametrization() const { return profile_.has_curve(); }
  /// B(s, theta) = (sqrt(b) cos theta, sqrt(b) sin theta, a) for gamma(s) = (a, b).
  Vec3 boundary_point(double s, double theta) const;
  /// d B / d s and d B / d theta.
  std::pair<Vec3, Vec3> boundary_tangents(double s, double theta) const;
  /// Box enclosing the closure of Omega with a margin.
  Box<3> box() const;
  double diameter() const;

 private:
  TorusDomain(Profile profile, AmbientField psi) : profile_(std::move(profile)), psi_(std::move(psi)) {}
  Profile profile_;
  AmbientField psi_;
};

/// Domain {psi < 0} searched inside a box.
struct ImplicitDomain {
  std::string kind;
  Params params;
  AmbientField psi;
  Box<3> box;
  std::vector<Vec3> seeds;

  std::string description() const;
  double diameter() const { return box.diameter(); }
};

/// {xi : rho(center . xi^-1) <= r}, defined by rho(center . xi^-1)^4 - r^4.
ImplicitDomain koranyi_ball(const HPoint& center, double r);
/// Euclidean ball |xi - center| < r.
ImplicitDomain euclidean_ball(const Vec3& center, double r);
/// {t < level} searched inside the box.
ImplicitDomain half_space(double level, const Box<3>& box);
/// Same boundary, defining field multiplied by h > 0.
ImplicitDomain rescaled_defining(const ImplicitDomain& d, const AmbientField& h, const std::string& tag);
/// The torus seen as a generic implicit domain (for profiles without a curve).
ImplicitDomain as_implicit(const TorusDomain& d);

enum class Exec { Serial, Parallel };

struct MeshSample {
  Vec3 xi;
  GradientData<3> grad;
  std::optional<double> s;
  std::optional<double> theta;
  std::array<int, 3> cell{-1, -1, -1};  // box-grid meshes only
};

struct BoundaryMesh {
  enum class Kind { Parametric, BoxGrid } kind = Kind::Parametric;
  int n_s = 0;
  int n_theta = 0;
  int grid = 0;
  Box<3> box{};
  /// Parametric: sample (i, j) at index i * n_theta + j. Box grid: sorted by cell index.
  std::vector<MeshSample> samples;
  /// max |grad psi| over the mesh times the domain diameter.
  double scale = 1.0;
  std::size_t dropped = 0;  // seeds that failed to project within two cells
};

/// Tensor grid s_i = i / n_s, theta_j = 2 pi j / n_theta.
BoundaryMesh boundary_mesh(const TorusDomain& domain, int n_s, int n_theta, Exec exec = Exec::Parallel);
/// Sign-change cells of a grid^3 lattice over the box, Newton-projected onto {psi = 0}.
BoundaryMesh boundary_mesh(const ImplicitDomain& domain, int grid, Exec exec = Exec::Parallel);

}  // namespace heischar
