#pragma once

// Derivative dispatch, the profile composition Psi(x, y, t) = u(t, x^2 + y^2),
// and defining-function validation.

#include <optional>
#include <span>
#include <vector>

#include "heischar/heis_core.hpp"
#include "heischar/scalar_field.hpp"

namespace heischar {

template <int Dim>
struct GradientData {
  double value = 0.0;
  Vec<Dim> euclidean = Vec<Dim>::Zero();
  /// (X Psi, Y Psi); present for ambient fields only.
  std::optional<Vec2> horizontal;

  double euclidean_norm() const { return euclidean.norm(); }
};

/// Value and gradient at p (analytic when supplied, else Richardson central
/// differences). Throws DomainError outside the field's box and
/// NumericalError on non-finite output.
template <int Dim>
GradientData<Dim> eval_with_gradient(const ScalarField<Dim>& f, const Vec<Dim>& p) {
  if (!f.box().contains(p)) throw DomainError("eval_with_gradient: point outside the field's box");
  GradientData<Dim> out;
  out.value = f.value(p);
  out.euclidean = f.gradient(p);
  if (!std::isfinite(out.value) || !out.euclidean.allFinite()) {
    throw NumericalError("eval_with_gradient: non-finite value or derivative");
  }
  if constexpr (Dim == 3) out.horizontal = h1::horizontal(out.euclidean, p);
  return out;
}

/// Psi(x, y, t) = u(t, x^2 + y^2). The planar field's first coordinate is the
/// t-coordinate and its second the |z|^2-coordinate. Gradient and Hessian are
/// assembled by the chain rule from u's derivatives.
AmbientField compose_profile(const PlanarField& u);

/// Pointwise product h * psi (a second defining function of the same domain
/// when h > 0).
AmbientField scale_by(const AmbientField& h, const AmbientField& psi);

struct DefiningCheck {
  bool ok = false;
  double min_gradient_norm = 0.0;
  std::size_t argmin = 0;
  double tol = 0.0;
  /// Indices of samples whose Euclidean gradient norm is at most tol.
  std::vector<std::size_t> failures;
};

/// Checks grad f != 0 on boundary samples: ok iff min |grad f| > tol.
/// Samples must satisfy |f| <= tol * scale.
DefiningCheck validate_defining(const AmbientField& f, std::span<const Vec3> boundary_samples,
                                double tol, double scale = 1.0);

/// Largest relative mismatch between the analytic gradient and Richardson
/// differences over the given points (0 when the field has no analytic
/// gradient). Relative to max(1, |grad|).
template <int Dim>
double analytic_gradient_mismatch(const ScalarField<Dim>& f, std::span<const Vec<Dim>> points) {
  if (!f.has_analytic_gradient()) return 0.0;
  double worst = 0.0;
  for (const auto& p : points) {
    const Vec<Dim> a = f.gradient(p);
    const Vec<Dim> n = fd::richardson_gradient<Dim>(f.value_fn(), p, f.fd_policy().gradient_step);
    worst = std::max(worst, (a - n).norm() / std::max(1.0, a.norm()));
  }
  return worst;
}

}  // namespace heischar
