#pragma once

// Characteristic points of domain boundaries: the normalized measure, tangent
// frames and their horizontal intersections, mesh scanning with local
// refinement, and certificates for convex and circular profiles.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heischar/convex_geometry.hpp"
#include "heischar/fields.hpp"
#include "heischar/heis_core.hpp"
#include "heischar/profiles.hpp"

namespace heischar {

/// |grad_H psi| / (|grad psi| (1 + 2|z|)). Throws NumericalError when
/// |grad psi| <= min_gradient.
double char_measure(const AmbientField& psi, const Vec3& xi, double min_gradient = 0.0);

/// Ratio sigma_min / sigma_max of the 2x3 matrix of unit rows (a, b); equals
/// tan(phi / 2) with phi the angle between the lines spanned by a and b.
double row_pair_conditioning(const Vec3& a, const Vec3& b);

/// Default rank tolerance: lines at angle phi count as one iff sin(phi) < tol_char.
inline double rank_tol_for(double tol_char) { return 0.5 * tol_char; }

struct TangentFrame {
  Vec3 xi;
  std::array<Vec3, 2> basis;  // orthonormal, spanning ker grad psi
  Vec3 X;
  Vec3 Y;
  int intersection_dim = 1;
  std::optional<Vec3> generator;  // unit, dim 1 only
  double conditioning = 0.0;      // row_pair_conditioning(grad psi, contact covector)
};

TangentFrame tangent_frame(const AmbientField& psi, const Vec3& xi, double tol_char = 1e-6);

/// (v_t, 2(x v_x + y v_y)) lies on the tangent line of the profile boundary at w(xi),
/// within 1e-9 in angle.
bool tangent_membership(const TorusDomain& domain, const Vec3& xi, const Vec3& v);

/// grad_H psi / |grad_H psi|; DomainError at points with m <= tol_char.
HorizontalVector horizontal_normal(const AmbientField& psi, const Vec3& xi, double tol_char = 1e-6);

struct ScanConfig {
  int n_s = 256;
  int n_theta = 64;
  int grid = 64;
  double tol_char = 1e-6;
  double tol_suspect = 1e-3;
  /// Default 1e-3 times the domain diameter.
  std::optional<double> dedupe_radius;
  int refine_iters = 200;
  /// Also refine torus minima over (s, theta) and record the discrepancy.
  bool validate_full_refinement = false;
  Exec exec = Exec::Parallel;
};

struct BoundarySample {
  Vec3 xi;
  GradientData<3> grad;
  double m = 0.0;
  std::optional<double> s;
  std::optional<double> theta;
};

struct CharPoint {
  Vec3 xi;
  double m = 0.0;
  bool converged = false;
  int iterations = 0;
  bool polished = false;
  std::optional<double> s;
  std::optional<double> theta;
};

enum class TangencyCase { AxisT, AxisZ, Generic };
const char* to_string(TangencyCase c);

struct CertificateSample {
  double s = 0.0;
  double theta = 0.0;
  Vec3 xi;
  int intersection_dim = 1;
  double conditioning = 0.0;
  TangencyCase tangency = TangencyCase::Generic;
  double hgrad = 0.0;
};

struct DiscBound {
  double min_hgrad_sq = 0.0;
  double min_hgrad = 0.0;
};

/// On the boundary of the lift of the disc |w - (a1 + i a2)| < r with
/// u = |w - c|^2 - r^2: |grad_H Psi|^2 = 16 |z|^2 r^2 >= 16 (a2 - r) r^2.
DiscBound disc_certificate(double a1, double a2, double r);

struct ConvexCertificate {
  bool pass = false;
  int n_samples = 0;
  double tol_char = 0.0;
  double rank_tol = 0.0;
  std::map<std::string, int> case_counts;
  int dim_one = 0;
  std::vector<std::size_t> violations;
  double min_conditioning = 0.0;
  double min_hgrad = 0.0;
  std::optional<DiscBound> analytic;
  std::vector<CertificateSample> samples;
};

/// Rank check of the tangency and horizontality covectors at n_samples points
/// of the boundary of the lifted convex profile.
ConvexCertificate certify_convex(const ConvexProfile& cp, int n_samples, double tol_char = 1e-6);

struct CharacteristicReport {
  std::string domain_kind;
  std::string domain_description;
  Params domain_params;
  bool parametric = false;

  BoundaryMesh::Kind mesh_kind = BoundaryMesh::Kind::Parametric;
  int n_s = 0;
  int n_theta = 0;
  int grid = 0;
  std::size_t dropped = 0;
  double scale = 0.0;
  double diameter = 0.0;

  double tol_char = 0.0;
  double tol_suspect = 0.0;
  double dedupe_radius = 0.0;
  int refine_iters = 0;
  double newton_tol = 0.0;
  double degenerate_tol = 0.0;
  double rank_tol = 0.0;

  std::vector<BoundarySample> samples;
  double global_min_m = 0.0;
  Vec3 global_min_xi = Vec3::Zero();
  std::optional<double> global_min_s;
  double min_hgrad = 0.0;
  Vec3 min_hgrad_xi = Vec3::Zero();

  std::vector<CharPoint> characteristic;
  std::vector<CharPoint> suspect;
  std::size_t minima_refined = 0;
  std::vector<std::size_t> defining_violations;
  std::optional<double> theta_variation;
  std::optional<double> full_refinement_discrepancy;
  std::optional<ConvexCertificate> certificate;
  std::map<std::string, double> timings;

  std::string finding() const;
};

CharacteristicReport scan(const TorusDomain& domain, const ScanConfig& config = {});
CharacteristicReport scan(const ImplicitDomain& domain, const ScanConfig& config = {});

}  // namespace heischar
