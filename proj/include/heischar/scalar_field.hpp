#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "heischar/error.hpp"

namespace heischar {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;
template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Axis-aligned box; every field declares the box on which it is total and finite.
template <int Dim>
struct Box {
  Vec<Dim> lo;
  Vec<Dim> hi;

  bool contains(const Vec<Dim>& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  Vec<Dim> extent() const { return hi - lo; }
  Vec<Dim> center() const { return 0.5 * (lo + hi); }
  double diameter() const { return extent().norm(); }
  Box expanded(double factor) const {
    Vec<Dim> half = 0.5 * factor * extent();
    return {center() - half, center() + half};
  }
};

/// Relative step sizes for derivative fallbacks. Steps are scaled by
/// max(1, |coordinate|).
struct FdPolicy {
  double gradient_step = std::cbrt(std::numeric_limits<double>::epsilon());
  double hessian_step = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  bool richardson = true;
};

namespace fd {

inline double step_for(double coordinate, double relative) {
  return relative * std::max(1.0, std::abs(coordinate));
}

/// Plain second-order central difference with a fixed absolute step per axis.
template <int Dim, class F>
Vec<Dim> central_gradient(const F& f, const Vec<Dim>& p, const Vec<Dim>& h) {
  Vec<Dim> g;
  for (int i = 0; i < Dim; ++i) {
    Vec<Dim> a = p, b = p;
    a[i] += h[i];
    b[i] -= h[i];
    g[i] = (f(a) - f(b)) / (2.0 * h[i]);
  }
  return g;
}

/// Central differences at h and h/2 combined by one Richardson step,
/// cancelling the O(h^2) term.
template <int Dim, class F>
Vec<Dim> richardson_gradient(const F& f, const Vec<Dim>& p, double relative_step) {
  Vec<Dim> h;
  for (int i = 0; i < Dim; ++i) h[i] = step_for(p[i], relative_step);
  const Vec<Dim> coarse = central_gradient<Dim>(f, p, h);
  const Vec<Dim> fine = central_gradient<Dim>(f, p, Vec<Dim>(0.5 * h));
  return (4.0 * fine - coarse) / 3.0;
}

/// Jacobian of a gradient-like map by central differences; symmetrized.
template <int Dim, class G>
Mat<Dim> central_hessian(const G& grad, const Vec<Dim>& p, double relative_step) {
  Mat<Dim> H;
  for (int i = 0; i < Dim; ++i) {
    const double h = step_for(p[i], relative_step);
    Vec<Dim> a = p, b = p;
    a[i] += h;
    b[i] -= h;
    H.col(i) = (grad(a) - grad(b)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

/// Second differences of values, step h per axis.
template <int Dim, class F>
Mat<Dim> nested_hessian(const F& f, const Vec<Dim>& p, double relative_step) {
  Vec<Dim> h;
  for (int i = 0; i < Dim; ++i) h[i] = step_for(p[i], relative_step);
  const double f0 = f(p);
  Mat<Dim> H;
  for (int i = 0; i < Dim; ++i) {
    Vec<Dim> a = p, b = p;
    a[i] += h[i];
    b[i] -= h[i];
    H(i, i) = (f(a) - 2.0 * f0 + f(b)) / (h[i] * h[i]);
    for (int j = i + 1; j < Dim; ++j) {
      Vec<Dim> pp = a, pm = a, mp = b, mm = b;
      pp[j] += h[j];
      pm[j] -= h[j];
      mp[j] += h[j];
      mm[j] -= h[j];
      H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
    }
  }
  return H;
}

}  // namespace fd

/// A real function on R^Dim with optional analytic first and second
/// derivatives. Missing derivatives fall back to finite differences
/// (Richardson-extrapolated central differences for the gradient; central
/// differences of the analytic gradient, or second differences of values, for
/// the Hessian).
///
/// Instances are immutable; evaluators must be re-entrant so a field can be
/// shared across OpenMP threads.
template <int Dim>
class ScalarField {
 public:
  static constexpr int arity = Dim;
  using Point = Vec<Dim>;
  using Matrix = Mat<Dim>;
  using ValueFn = std::function<double(const Point&)>;
  using GradientFn = std::function<Point(const Point&)>;
  using HessianFn = std::function<Matrix(const Point&)>;

  ScalarField(ValueFn value, Box<Dim> box, GradientFn gradient = {}, HessianFn hessian = {},
              FdPolicy fd = {})
      : value_(std::move(value)),
        gradient_(std::move(gradient)),
        hessian_(std::move(hessian)),
        box_(std::move(box)),
        fd_(fd) {
    if (!value_) throw ValidationError("scalar field needs an evaluator");
  }

  double value(const Point& p) const { return value_(p); }
  double operator()(const Point& p) const { return value_(p); }

  Point gradient(const Point& p) const {
    if (gradient_) return gradient_(p);
    if (fd_.richardson) return fd::richardson_gradient<Dim>(value_, p, fd_.gradient_step);
    Point h;
    for (int i = 0; i < Dim; ++i) h[i] = fd::step_for(p[i], fd_.gradient_step);
    return fd::central_gradient<Dim>(value_, p, h);
  }

  Matrix hessian(const Point& p) const {
    if (hessian_) return hessian_(p);
    if (gradient_) return fd::central_hessian<Dim>(gradient_, p, fd_.hessian_step);
    return fd::nested_hessian<Dim>(value_, p, fd_.hessian_step);
  }

  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }
  bool has_analytic_hessian() const { return static_cast<bool>(hessian_); }
  const Box<Dim>& box() const { return box_; }
  const FdPolicy& fd_policy() const { return fd_; }

  /// Same field with every derivative routed through finite differences.
  ScalarField without_analytic_derivatives() const { return ScalarField(value_, box_, {}, {}, fd_); }
  ScalarField with_fd_policy(FdPolicy fd) const {
    return ScalarField(value_, box_, gradient_, hessian_, fd);
  }
  ScalarField with_box(Box<Dim> box) const {
    return ScalarField(value_, std::move(box), gradient_, hessian_, fd_);
  }

  const ValueFn& value_fn() const { return value_; }
  const GradientFn& gradient_fn() const { return gradient_; }
  const HessianFn& hessian_fn() const { return hessian_; }

 private:
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  Box<Dim> box_;
  FdPolicy fd_;
};

using PlanarField = ScalarField<2>;
using AmbientField = ScalarField<3>;

}  // namespace heischar
