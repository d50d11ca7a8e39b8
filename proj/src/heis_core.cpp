#include "heischar/heis_core.hpp"

#include <fmt/core.h>

#include <cmath>

namespace heischar {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(fmt::format("{} must be finite", what));
}

void require_same_dim(const HPoint& p, const HPoint& q) {
  if (p.dim() != q.dim()) {
    throw DimensionMismatch(fmt::format("H^{} point combined with H^{} point", p.dim(), q.dim()));
  }
}

}  // namespace

HPoint::HPoint(std::vector<double> x, std::vector<double> y, double t)
    : x_(std::move(x)), y_(std::move(y)), t_(t) {
  if (x_.empty() || x_.size() != y_.size()) {
    throw DimensionMismatch("HPoint needs n >= 1 with |x| = |y| = n");
  }
  for (double v : x_) require_finite(v, "x coordinate");
  for (double v : y_) require_finite(v, "y coordinate");
  require_finite(t_, "t coordinate");
}

HPoint HPoint::origin(int n) {
  if (n < 1) throw DimensionMismatch("H^n requires n >= 1");
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
}

double HPoint::z_norm_sq() const {
  double s = 0.0;
  for (int j = 0; j < dim(); ++j) s += x_[j] * x_[j] + y_[j] * y_[j];
  return s;
}

Vec3 HPoint::to_vec3() const {
  if (dim() != 1) throw DimensionMismatch("to_vec3 requires a point of H^1");
  return {x_[0], y_[0], t_};
}

Eigen::VectorXd HPoint::coords() const {
  const int n = dim();
  Eigen::VectorXd c(2 * n + 1);
  for (int j = 0; j < n; ++j) {
    c[j] = x_[j];
    c[n + j] = y_[j];
  }
  c[2 * n] = t_;
  return c;
}

TangentVector::TangentVector(HPoint base_point, std::vector<double> vx_, std::vector<double> vy_,
                             double vt_)
    : base(std::move(base_point)), vx(std::move(vx_)), vy(std::move(vy_)), vt(vt_) {
  if (static_cast<int>(vx.size()) != base.dim() || static_cast<int>(vy.size()) != base.dim()) {
    throw DimensionMismatch("tangent vector components do not match the base point dimension");
  }
  for (double v : vx) require_finite(v, "tangent component");
  for (double v : vy) require_finite(v, "tangent component");
  require_finite(vt, "tangent component");
}

Eigen::VectorXd TangentVector::coords() const {
  const int n = base.dim();
  Eigen::VectorXd c(2 * n + 1);
  for (int j = 0; j < n; ++j) {
    c[j] = vx[j];
    c[n + j] = vy[j];
  }
  c[2 * n] = vt;
  return c;
}

Vec3 TangentVector::to_vec3() const {
  if (base.dim() != 1) throw DimensionMismatch("to_vec3 requires a vector on H^1");
  return {vx[0], vy[0], vt};
}

HorizontalVector::HorizontalVector(HPoint base_point, std::vector<double> a, std::vector<double> b)
    : base(std::move(base_point)), alpha(std::move(a)), beta(std::move(b)) {
  if (static_cast<int>(alpha.size()) != base.dim() || static_cast<int>(beta.size()) != base.dim()) {
    throw DimensionMismatch("horizontal coefficients do not match the base point dimension");
  }
  for (double v : alpha) require_finite(v, "horizontal coefficient");
  for (double v : beta) require_finite(v, "horizontal coefficient");
}

double HorizontalVector::norm() const {
  double s = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) s += alpha[j] * alpha[j] + beta[j] * beta[j];
  return std::sqrt(s);
}

TangentVector HorizontalVector::to_tangent() const {
  // sum alpha_j X_j + beta_j Y_j; the t-part collects 2(alpha_j y_j - beta_j x_j).
  double vt = 0.0;
  for (int j = 0; j < base.dim(); ++j) vt += 2.0 * (alpha[j] * base.y(j) - beta[j] * base.x(j));
  return {base, alpha, beta, vt};
}

HPoint group_mul(const HPoint& p, const HPoint& q) {
  require_same_dim(p, q);
  const int n = p.dim();
  std::vector<double> x(n), y(n);
  double twist = 0.0;
  for (int j = 0; j < n; ++j) {
    x[j] = p.x(j) + q.x(j);
    y[j] = p.y(j) + q.y(j);
    twist += q.x(j) * p.y(j) - p.x(j) * q.y(j);
  }
  return {std::move(x), std::move(y), p.t() + q.t() + 2.0 * twist};
}

HPoint group_inv(const HPoint& p) {
  std::vector<double> x(p.x()), y(p.y());
  for (double& v : x) v = -v;
  for (double& v : y) v = -v;
  return {std::move(x), std::move(y), -p.t()};
}

HPoint dilate(double lambda, const HPoint& p) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError(fmt::format("dilation factor must be positive, got {}", lambda));
  }
  std::vector<double> x(p.x()), y(p.y());
  for (double& v : x) v *= lambda;
  for (double& v : y) v *= lambda;
  return {std::move(x), std::move(y), lambda * lambda * p.t()};
}

Eigen::MatrixXd dilation_jacobian(double lambda, int n) {
  if (!(lambda > 0.0)) throw DomainError("dilation factor must be positive");
  if (n < 1) throw DimensionMismatch("H^n requires n >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(2 * n + 1, lambda);
  diag[2 * n] = lambda * lambda;
  return diag.asDiagonal();
}

double gauge(const HPoint& p) {
  double s = 0.0;
  for (int j = 0; j < p.dim(); ++j) {
    const double r2 = p.x(j) * p.x(j) + p.y(j) * p.y(j);
    s += r2 * r2;
  }
  return std::pow(s + p.t() * p.t(), 0.25);
}

double distance(const HPoint& p, const HPoint& q) {
  require_same_dim(p, q);
  return gauge(group_mul(p, group_inv(q)));
}

Frame frame_at(const HPoint& p) {
  const int n = p.dim();
  Frame frame{{}, {}, TangentVector(p, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 1.0)};
  for (int j = 0; j < n; ++j) {
    std::vector<double> ex(n, 0.0), ey(n, 0.0), zero(n, 0.0);
    ex[j] = 1.0;
    ey[j] = 1.0;
    frame.X.emplace_back(p, ex, zero, 2.0 * p.y(j));
    frame.Y.emplace_back(p, zero, ey, -2.0 * p.x(j));
  }
  return frame;
}

TangentVector left_translate_push(const HPoint& g, const TangentVector& v) {
  require_same_dim(g, v.base);
  double vt = v.vt;
  for (int j = 0; j < g.dim(); ++j) vt += 2.0 * (g.y(j) * v.vx[j] - g.x(j) * v.vy[j]);
  return {group_mul(g, v.base), v.vx, v.vy, vt};
}

double contact_form(const HPoint& p, const TangentVector& v) {
  require_same_dim(p, v.base);
  if (!(p == v.base)) throw DomainError("contact_form: vector is not based at the given point");
  double value = v.vt;
  for (int j = 0; j < p.dim(); ++j) value += 2.0 * p.x(j) * v.vy[j] - 2.0 * p.y(j) * v.vx[j];
  return value;
}

HorizontalVector j_map(const HorizontalVector& h) {
  std::vector<double> a(h.beta), b(h.alpha);
  for (double& v : a) v = -v;
  return {h.base, std::move(a), std::move(b)};
}

HorizontalVector horizontal_gradient(const HPoint& p, std::span<const double> grad) {
  const int n = p.dim();
  if (static_cast<int>(grad.size()) != 2 * n + 1) {
    throw DimensionMismatch("Euclidean gradient size does not match 2n + 1");
  }
  const double ft = grad[2 * n];
  std::vector<double> a(n), b(n);
  for (int j = 0; j < n; ++j) {
    a[j] = grad[j] + 2.0 * p.y(j) * ft;
    b[j] = grad[n + j] - 2.0 * p.x(j) * ft;
  }
  return {p, std::move(a), std::move(b)};
}

HorizontalVector horizontal_gradient(const AmbientField& f, const HPoint& p) {
  const Vec3 g = f.gradient(p.to_vec3());
  if (!g.allFinite()) throw NumericalError("horizontal_gradient: non-finite derivative");
  return horizontal_gradient(p, std::span<const double>(g.data(), 3));
}

double sublaplacian(const HPoint& p, const Eigen::MatrixXd& H) {
  const int n = p.dim();
  if (H.rows() != 2 * n + 1 || H.cols() != 2 * n + 1) {
    throw DimensionMismatch("Hessian size does not match 2n + 1");
  }
  const int t = 2 * n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = p.x(j), y = p.y(j);
    sum += H(j, j) + 4.0 * y * H(j, t) + 4.0 * y * y * H(t, t);
    sum += H(n + j, n + j) - 4.0 * x * H(n + j, t) + 4.0 * x * x * H(t, t);
  }
  return -sum;
}

double sublaplacian(const AmbientField& f, const HPoint& p) {
  const Mat3 H = f.hessian(p.to_vec3());
  if (!H.allFinite()) throw NumericalError("sublaplacian: non-finite second derivative");
  return h1::sublaplacian(H, p.to_vec3());
}

SiegelPoint siegel_embed(const HPoint& p) {
  SiegelPoint xi;
  xi.reserve(p.dim() + 1);
  xi.emplace_back(p.t(), p.z_norm_sq());
  for (int j = 0; j < p.dim(); ++j) xi.push_back(p.z(j));
  return xi;
}

SiegelPoint siegel_action(const HPoint& g, const SiegelPoint& xi) {
  const int n = g.dim();
  if (static_cast<int>(xi.size()) != n + 1) {
    throw DimensionMismatch("Siegel point must have n + 1 complex components");
  }
  const std::complex<double> i(0.0, 1.0);
  SiegelPoint out(xi.size());
  std::complex<double> cross = 0.0;
  for (int j = 0; j < n; ++j) cross += xi[j + 1] * std::conj(g.z(j));
  out[0] = xi[0] + g.t() + i * g.z_norm_sq() + 2.0 * i * cross;
  for (int j = 0; j < n; ++j) out[j + 1] = xi[j + 1] + g.z(j);
  return out;
}

double siegel_defect(const SiegelPoint& xi) {
  double s = 0.0;
  for (std::size_t j = 1; j < xi.size(); ++j) s += std::norm(xi[j]);
  return xi[0].imag() - s;
}

}  // namespace heischar
