#include "heischar/char_analysis.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "heischar/kernels.hpp"
#include "heischar/torus_map.hpp"

namespace heischar {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinStep = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec2 horizontal_of(const AmbientField& psi, const Vec3& xi) { return h1::horizontal(psi.gradient(xi), xi); }

double hgrad_sq(const AmbientField& psi, const Vec3& xi) { return horizontal_of(psi, xi).squaredNorm(); }

double measure_at(const AmbientField& psi, const Vec3& xi) {
  const Vec3 g = psi.gradient(xi);
  return h1::horizontal(g, xi).norm() / (g.norm() * (1.0 + 2.0 * std::hypot(xi[0], xi[1])));
}

/// Rows: grad(X psi), grad(Y psi), grad psi.
Mat3 horizontal_jacobian(const AmbientField& psi, const Vec3& xi) {
  const Vec3 g = psi.gradient(xi);
  const Mat3 H = psi.hessian(xi);
  Mat3 J;
  J.row(0) = (H * h1::X(xi) + Vec3(0.0, 2.0 * g[2], 0.0)).transpose();
  J.row(1) = (H * h1::Y(xi) + Vec3(-2.0 * g[2], 0.0, 0.0)).transpose();
  J.row(2) = g.transpose();
  return J;
}

enum class Objective { HorizontalSq, Measure };

double objective(Objective o, const AmbientField& psi, const Vec3& xi) {
  return o == Objective::HorizontalSq ? hgrad_sq(psi, xi) : measure_at(psi, xi);
}

Vec3 objective_gradient(Objective o, const AmbientField& psi, const Vec3& xi) {
  if (o == Objective::HorizontalSq) {
    const Mat3 J = horizontal_jacobian(psi, xi);
    const Vec2 h = horizontal_of(psi, xi);
    return 2.0 * (J.row(0).transpose() * h[0] + J.row(1).transpose() * h[1]);
  }
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-7 * std::max(1.0, std::abs(xi[i]));
    Vec3 a = xi, b = xi;
    a[i] += h;
    b[i] -= h;
    g[i] = (measure_at(psi, a) - measure_at(psi, b)) / (2.0 * h);
  }
  return g;
}

struct Descent {
  Vec3 xi;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected descent on the surface {psi = 0}: step along the tangential part
/// of -grad f, Newton re-projection, step halving on non-decrease.
Descent descend_surface(const AmbientField& psi, const Vec3& start, Objective o, double step0, int max_iter,
                        double newton_tol, double stop_m, const Box<3>& box) {
  Descent d{start, objective(o, psi, start), 0, false};
  double step = step0;
  for (; d.iterations < max_iter; ++d.iterations) {
    if (stop_m > 0.0 && measure_at(psi, d.xi) < stop_m) {
      d.converged = true;
      break;
    }
    if (step < kMinStep) {
      d.converged = true;
      break;
    }
    const Vec3 g = objective_gradient(o, psi, d.xi);
    const Vec3 n = psi.gradient(d.xi).normalized();
    const Vec3 gt = g - g.dot(n) * n;
    const double len = gt.norm();
    if (!(len > 0.0)) {
      d.converged = true;
      break;
    }
    const auto pr = kernels::project_point(psi, d.xi - step * gt / len, newton_tol);
    double f = std::numeric_limits<double>::infinity();
    if (pr.converged && box.contains(pr.point)) f = objective(o, psi, pr.point);
    if (f < d.f) {
      d.xi = pr.point;
      d.f = f;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return d;
}

struct Descent1D {
  double s = 0.0;
  double theta = 0.0;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Compass search with step halving over (s) or (s, theta).
template <class F>
Descent1D compass(const F& f, double s0, double theta0, double step_s, double step_theta, bool two_d,
                  int max_iter, const std::function<bool(double, double)>& stop) {
  Descent1D d{s0, theta0, f(s0, theta0), 0, false};
  double scale = 1.0;
  for (; d.iterations < max_iter; ++d.iterations) {
    if (stop && stop(d.s, d.theta)) {
      d.converged = true;
      break;
    }
    if (scale * std::min(step_s, two_d ? step_theta : step_s) < kMinStep) {
      d.converged = true;
      break;
    }
    double best = d.f, bs = d.s, bt = d.theta;
    const double ds = scale * step_s, dt = scale * step_theta;
    const std::pair<double, double> moves[] = {{ds, 0.0}, {-ds, 0.0}, {0.0, dt}, {0.0, -dt}};
    for (int k = 0; k < (two_d ? 4 : 2); ++k) {
      const double s = d.s + moves[k].first, t = d.theta + moves[k].second;
      const double v = f(s, t);
      if (v < best) {
        best = v;
        bs = s;
        bt = t;
      }
    }
    if (best < d.f) {
      d.f = best;
      d.s = bs;
      d.theta = bt;
      scale *= 1.5;
    } else {
      scale *= 0.5;
    }
  }
  d.s -= std::floor(d.s);
  d.theta -= kTwoPi * std::floor(d.theta / kTwoPi);
  return d;
}

/// Newton on (X psi, Y psi, psi) = 0 from a near-characteristic point.
std::optional<Vec3> polish(const AmbientField& psi, const Vec3& start, double residual_tol, double max_move,
                           const Box<3>& box) {
  Vec3 xi = start;
  for (int it = 0; it < 30; ++it) {
    const Vec2 h = horizontal_of(psi, xi);
    const Vec3 F(h[0], h[1], psi.value(xi));
    const Mat3 J = horizontal_jacobian(psi, xi);
    Eigen::FullPivLU<Mat3> lu(J);
    if (!lu.isInvertible()) return std::nullopt;
    const Vec3 step = lu.solve(F);
    if (!step.allFinite()) return std::nullopt;
    xi -= step;
    if ((xi - start).norm() > max_move || !box.contains(xi)) return std::nullopt;
    if (step.norm() <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, xi.norm())) break;
  }
  const Vec2 h = horizontal_of(psi, xi);
  const double res = std::max(h.norm(), std::abs(psi.value(xi)));
  if (!(res <= residual_tol)) return std::nullopt;
  return xi;
}

bool lex_less(const CharPoint& a, const CharPoint& b) {
  if (a.m != b.m) return a.m < b.m;
  if (a.s && b.s && *a.s != *b.s) return *a.s < *b.s;
  if (a.theta && b.theta && *a.theta != *b.theta) return *a.theta < *b.theta;
  return std::lexicographical_compare(a.xi.data(), a.xi.data() + 3, b.xi.data(), b.xi.data() + 3);
}

void classify(std::vector<CharPoint> candidates, CharacteristicReport& rep) {
  std::stable_sort(candidates.begin(), candidates.end(), lex_less);
  std::vector<CharPoint> kept;
  for (const auto& c : candidates) {
    if (!(c.m < rep.tol_suspect)) continue;
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const CharPoint& k) {
      return h1::distance(c.xi, k.xi) <= rep.dedupe_radius;
    });
    if (!dup) kept.push_back(c);
  }
  for (auto& k : kept) (k.m < rep.tol_char ? rep.characteristic : rep.suspect).push_back(std::move(k));
}

void fill_common(CharacteristicReport& rep, const ScanConfig& cfg, const BoundaryMesh& mesh, double diameter) {
  if (!(cfg.tol_char > 0.0) || !(cfg.tol_suspect > cfg.tol_char)) {
    throw ValidationError("tolerances must satisfy 0 < tol_char < tol_suspect");
  }
  rep.mesh_kind = mesh.kind;
  rep.n_s = mesh.n_s;
  rep.n_theta = mesh.n_theta;
  rep.grid = mesh.grid;
  rep.dropped = mesh.dropped;
  rep.scale = mesh.scale;
  rep.diameter = diameter;
  rep.tol_char = cfg.tol_char;
  rep.tol_suspect = cfg.tol_suspect;
  rep.dedupe_radius = cfg.dedupe_radius.value_or(1e-3 * diameter);
  rep.refine_iters = cfg.refine_iters;
  rep.newton_tol = 1e-10 * mesh.scale;
  rep.degenerate_tol = 1e-10 * mesh.scale;
  rep.rank_tol = rank_tol_for(cfg.tol_char);
}

std::vector<double> sample_measures(const BoundaryMesh& mesh, Exec exec, CharacteristicReport& rep) {
  std::vector<Vec3> pts;
  std::vector<GradientData<3>> grads;
  pts.reserve(mesh.samples.size());
  grads.reserve(mesh.samples.size());
  for (const auto& s : mesh.samples) {
    pts.push_back(s.xi);
    grads.push_back(s.grad);
  }
  auto m = exec == Exec::Parallel ? kernels::measures(grads, pts) : kernels::measures_serial(grads, pts);
  rep.samples.resize(mesh.samples.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& ms = mesh.samples[i];
    if (!(ms.grad.euclidean_norm() > rep.degenerate_tol)) {
      rep.defining_violations.push_back(i);
      m[i] = std::numeric_limits<double>::quiet_NaN();
    }
    rep.samples[i] = {ms.xi, ms.grad, m[i], ms.s, ms.theta};
  }
  return m;
}

std::size_t argmin_valid(const std::vector<double>& v) {
  std::size_t best = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i])) continue;
    if (best == v.size() || v[i] < v[best]) best = i;
  }
  if (best == v.size()) throw NumericalError("every boundary sample violates the defining-function condition");
  return best;
}

}  // namespace

double char_measure(const AmbientField& psi, const Vec3& xi, double min_gradient) {
  const Vec3 g = psi.gradient(xi);
  if (!g.allFinite()) throw NumericalError("non-finite gradient");
  if (!(g.norm() > min_gradient)) throw NumericalError("vanishing gradient: not a defining function here");
  return h1::horizontal(g, xi).norm() / (g.norm() * (1.0 + 2.0 * std::hypot(xi[0], xi[1])));
}

double row_pair_conditioning(const Vec3& a, const Vec3& b) {
  Eigen::Matrix<double, 2, 3> M;
  M.row(0) = a.normalized().transpose();
  M.row(1) = b.normalized().transpose();
  const Vec2 sv = Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>>(M).singularValues();
  return sv[1] / sv[0];
}

TangentFrame tangent_frame(const AmbientField& psi, const Vec3& xi, double tol_char) {
  const Vec3 g = psi.gradient(xi);
  if (!g.allFinite() || !(g.norm() > 0.0)) throw NumericalError("degenerate gradient: tangent plane undefined");
  const Vec3 n = g.normalized();
  TangentFrame f;
  f.xi = xi;
  const Vec3 seed = std::abs(n[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  f.basis[0] = (seed - seed.dot(n) * n).normalized();
  f.basis[1] = n.cross(f.basis[0]);
  f.X = h1::X(xi);
  f.Y = h1::Y(xi);
  const Vec3 c = h1::contact_covector(xi);
  f.conditioning = row_pair_conditioning(g, c);
  f.intersection_dim = f.conditioning < rank_tol_for(tol_char) ? 2 : 1;
  if (f.intersection_dim == 1) f.generator = n.cross(c).normalized();
  return f;
}

bool tangent_membership(const TorusDomain& domain, const Vec3& xi, const Vec3& v) {
  const ProductPoint q = F(HPoint::from_vec3(xi));
  const Vec2 normal = domain.profile().implicit().gradient(q.w);
  if (!(normal.norm() > 0.0)) throw NumericalError("profile boundary has no tangent line here");
  const Vec2 pushed(v[2], 2.0 * (xi[0] * v[0] + xi[1] * v[1]));
  const double len = pushed.norm();
  if (len == 0.0) return true;
  return std::abs(pushed.dot(normal.normalized())) <= 1e-9 * len;
}

HorizontalVector horizontal_normal(const AmbientField& psi, const Vec3& xi, double tol_char) {
  const double m = char_measure(psi, xi);
  if (!(m > tol_char)) throw DomainError("horizontal normal is undefined at a characteristic point");
  const Vec2 h = horizontal_of(psi, xi).normalized();
  return HorizontalVector(HPoint::from_vec3(xi), {h[0]}, {h[1]});
}

const char* to_string(TangencyCase c) {
  switch (c) {
    case TangencyCase::AxisT: return "t0=a1";
    case TangencyCase::AxisZ: return "|z0|^2=a2";
    case TangencyCase::Generic: return "generic";
  }
  return "generic";
}

DiscBound disc_certificate(double a1, double a2, double r) {
  if (!std::isfinite(a1) || !(r > 0.0) || !(a2 > r)) {
    throw ValidationError(fmt::format("disc profile ({}, {}; {}) must satisfy a2 > r > 0", a1, a2, r));
  }
  DiscBound b;
  b.min_hgrad_sq = 16.0 * (a2 - r) * r * r;
  b.min_hgrad = std::sqrt(b.min_hgrad_sq);
  return b;
}

ConvexCertificate certify_convex(const ConvexProfile& cp, int n_samples, double tol_char) {
  if (n_samples < 1) throw ValidationError("certificate needs at least one sample");
  const TorusDomain domain = TorusDomain::make(cp.base());
  ConvexCertificate cert;
  cert.n_samples = n_samples;
  cert.tol_char = tol_char;
  cert.rank_tol = rank_tol_for(tol_char);
  cert.samples.resize(n_samples);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n_samples; ++k) {
    CertificateSample& cs = cert.samples[k];
    cs.s = static_cast<double>(k) / n_samples;
    const double frac = k * golden - std::floor(k * golden);
    cs.theta = kTwoPi * frac;
    cs.xi = domain.boundary_point(cs.s, cs.theta);
    const Vec2 n = cp.base().curve_normal(cs.s);
    const double x = cs.xi[0], y = cs.xi[1];
    const Vec3 tangency(2.0 * x * n[1], 2.0 * y * n[1], n[0]);
    const Vec3 intersection(2.0 * y, -2.0 * x, -1.0);
    cs.conditioning = row_pair_conditioning(tangency, intersection);
    cs.intersection_dim = cs.conditioning < cert.rank_tol ? 2 : 1;
    if (std::abs(n[0]) < 1e-9) {
      cs.tangency = TangencyCase::AxisT;
    } else if (std::abs(n[1]) < 1e-9) {
      cs.tangency = TangencyCase::AxisZ;
    } else {
      cs.tangency = TangencyCase::Generic;
    }
    cs.hgrad = horizontal_of(domain.psi(), cs.xi).norm();
  }
  cert.min_conditioning = std::numeric_limits<double>::infinity();
  cert.min_hgrad = std::numeric_limits<double>::infinity();
  for (const char* c : {"t0=a1", "|z0|^2=a2", "generic"}) cert.case_counts[c] = 0;
  for (std::size_t k = 0; k < cert.samples.size(); ++k) {
    const auto& cs = cert.samples[k];
    ++cert.case_counts[to_string(cs.tangency)];
    if (cs.intersection_dim == 1) {
      ++cert.dim_one;
    } else {
      cert.violations.push_back(k);
    }
    cert.min_conditioning = std::min(cert.min_conditioning, cs.conditioning);
    cert.min_hgrad = std::min(cert.min_hgrad, cs.hgrad);
  }
  if (cp.base().kind() == "disc") {
    const auto& p = cp.base().params();
    cert.analytic = disc_certificate(p.at("a1"), p.at("a2"), p.at("r"));
  }
  cert.pass = cert.violations.empty();
  return cert;
}

std::string CharacteristicReport::finding() const {
  const std::string res = parametric ? fmt::format("{}x{}", n_s, n_theta) : fmt::format("{}^3", grid);
  if (characteristic.empty()) return fmt::format("no characteristic point found at resolution {}", res);
  return fmt::format("{} characteristic point(s) found at resolution {}", characteristic.size(), res);
}

CharacteristicReport scan(const TorusDomain& domain, const ScanConfig& cfg) {
  const auto t_start = Clock::now();
  if (cfg.n_s < 1 || cfg.n_theta < 1) throw ValidationError("mesh dimensions must be positive");
  CharacteristicReport rep;
  rep.domain_kind = "torus";
  rep.domain_description = "torus over " + domain.profile().description();
  rep.domain_params = domain.profile().params();
  rep.parametric = true;

  auto t0 = Clock::now();
  const BoundaryMesh mesh = boundary_mesh(domain, cfg.n_s, cfg.n_theta, cfg.exec);
  fill_common(rep, cfg, mesh, domain.diameter());
  rep.timings["mesh"] = seconds_since(t0);

  t0 = Clock::now();
  const std::vector<double> m = sample_measures(mesh, cfg.exec, rep);
  const int ns = cfg.n_s, nt = cfg.n_theta;
  double variation = 0.0;
  for (int i = 0; i < ns; ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j < nt; ++j) {
      const double v = m[static_cast<std::size_t>(i) * nt + j];
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi >= lo) variation = std::max(variation, hi - lo);
  }
  rep.theta_variation = variation;
  rep.timings["measure"] = seconds_since(t0);

  t0 = Clock::now();
  const AmbientField& psi = domain.psi();
  auto hsq = [&](double s, double theta) { return hgrad_sq(psi, domain.boundary_point(s, theta)); };
  auto meas = [&](double s, double theta) { return measure_at(psi, domain.boundary_point(s, theta)); };
  const double stop_m = cfg.tol_char / 10.0;
  auto stop = [&](double s, double theta) { return meas(s, theta) < stop_m; };
  const double step_s = 1.0 / ns, step_t = kTwoPi / nt;

  std::vector<int> minima;
  for (int i = 0; i < ns; ++i) {
    const double c = m[static_cast<std::size_t>(i) * nt];
    const double l = m[static_cast<std::size_t>((i + ns - 1) % ns) * nt];
    const double r = m[static_cast<std::size_t>((i + 1) % ns) * nt];
    if (std::isnan(c)) continue;
    if ((std::isnan(l) || c <= l) && (std::isnan(r) || c < r)) minima.push_back(i);
  }
  rep.minima_refined = minima.size();

  std::vector<CharPoint> refined(minima.size());
  std::vector<double> full_gap(minima.size(), 0.0);
  const bool par = cfg.exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(minima.size()); ++k) {
    const double s0 = static_cast<double>(minima[k]) / ns;
    const Descent1D d = compass(hsq, s0, 0.0, step_s, step_t, false, cfg.refine_iters, stop);
    CharPoint c;
    c.xi = domain.boundary_point(d.s, 0.0);
    c.m = meas(d.s, 0.0);
    c.converged = d.converged;
    c.iterations = d.iterations;
    c.s = d.s;
    c.theta = 0.0;
    refined[k] = c;
    if (cfg.validate_full_refinement) {
      const Descent1D d2 = compass(hsq, s0, 0.0, step_s, step_t, true, cfg.refine_iters, stop);
      full_gap[k] = std::abs(meas(d2.s, d2.theta) - c.m);
    }
  }
  if (cfg.validate_full_refinement) {
    rep.full_refinement_discrepancy = minima.empty() ? 0.0 : *std::max_element(full_gap.begin(), full_gap.end());
  }

  const std::size_t gi = argmin_valid(m);
  const Descent1D gm = compass(meas, *mesh.samples[gi].s, *mesh.samples[gi].theta, step_s, step_t, false,
                               cfg.refine_iters, {});
  rep.global_min_m = std::min(m[gi], gm.f);
  rep.global_min_xi = gm.f < m[gi] ? domain.boundary_point(gm.s, gm.theta) : mesh.samples[gi].xi;
  rep.global_min_s = gm.f < m[gi] ? gm.s : *mesh.samples[gi].s;
  for (const auto& c : refined) {
    if (c.m < rep.global_min_m) {
      rep.global_min_m = c.m;
      rep.global_min_xi = c.xi;
      rep.global_min_s = c.s;
    }
  }

  std::vector<double> hg(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    hg[i] = std::isnan(m[i]) ? m[i] : mesh.samples[i].grad.horizontal->norm();
  }
  const std::size_t hi = argmin_valid(hg);
  const Descent1D hm = compass(hsq, *mesh.samples[hi].s, *mesh.samples[hi].theta, step_s, step_t, false,
                               cfg.refine_iters, {});
  rep.min_hgrad = std::min(hg[hi], std::sqrt(hm.f));
  rep.min_hgrad_xi = std::sqrt(hm.f) < hg[hi] ? domain.boundary_point(hm.s, hm.theta) : mesh.samples[hi].xi;

  classify(std::move(refined), rep);
  rep.timings["refine"] = seconds_since(t0);
  rep.timings["total"] = seconds_since(t_start);
  return rep;
}

CharacteristicReport scan(const ImplicitDomain& domain, const ScanConfig& cfg) {
  const auto t_start = Clock::now();
  CharacteristicReport rep;
  rep.domain_kind = domain.kind;
  rep.domain_description = domain.description();
  rep.domain_params = domain.params;
  rep.parametric = false;

  auto t0 = Clock::now();
  const BoundaryMesh mesh = boundary_mesh(domain, cfg.grid, cfg.exec);
  fill_common(rep, cfg, mesh, domain.diameter());
  rep.timings["mesh"] = seconds_since(t0);

  t0 = Clock::now();
  const std::vector<double> m = sample_measures(mesh, cfg.exec, rep);
  rep.timings["measure"] = seconds_since(t0);

  t0 = Clock::now();
  const kernels::Lattice lattice{domain.box, cfg.grid};
  std::vector<std::size_t> cell_ids(mesh.samples.size());
  for (std::size_t i = 0; i < cell_ids.size(); ++i) cell_ids[i] = lattice.cell_index(mesh.samples[i].cell);
  auto lookup = [&](const std::array<int, 3>& c) -> std::optional<std::size_t> {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < 0 || c[a] >= cfg.grid) return std::nullopt;
    }
    const std::size_t id = lattice.cell_index(c);
    const auto it = std::lower_bound(cell_ids.begin(), cell_ids.end(), id);
    if (it == cell_ids.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - cell_ids.begin());
  };
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (std::isnan(m[i])) continue;
    bool is_min = true;
    const auto& c = mesh.samples[i].cell;
    for (int di = -1; di <= 1 && is_min; ++di) {
      for (int dj = -1; dj <= 1 && is_min; ++dj) {
        for (int dk = -1; dk <= 1 && is_min; ++dk) {
          if (di == 0 && dj == 0 && dk == 0) continue;
          const auto j = lookup({c[0] + di, c[1] + dj, c[2] + dk});
          if (!j || std::isnan(m[*j])) continue;
          if (m[*j] < m[i] || (m[*j] == m[i] && *j < i)) is_min = false;
        }
      }
    }
    if (is_min) minima.push_back(i);
  }
  rep.minima_refined = minima.size();

  const AmbientField& psi = domain.psi;
  const double step0 = lattice.spacing().minCoeff();
  const double stop_m = cfg.tol_char / 10.0;
  std::vector<CharPoint> refined(minima.size());
  const bool par = cfg.exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(minima.size()); ++k) {
    const Vec3 start = mesh.samples[minima[k]].xi;
    const Descent d = descend_surface(psi, start, Objective::HorizontalSq, step0, cfg.refine_iters, rep.newton_tol,
                                      stop_m, domain.box);
    CharPoint c;
    c.xi = d.xi;
    c.m = measure_at(psi, d.xi);
    c.converged = d.converged;
    c.iterations = d.iterations;
    if (c.m < cfg.tol_suspect) {
      const auto p = polish(psi, d.xi, 1e-12 * rep.scale, rep.dedupe_radius, domain.box);
      if (p) {
        const double pm = measure_at(psi, *p);
        if (pm <= c.m) {
          c.xi = *p;
          c.m = pm;
          c.polished = true;
          c.converged = true;
        }
      }
    }
    refined[k] = c;
  }

  const std::size_t gi = argmin_valid(m);
  const Descent gd = descend_surface(psi, mesh.samples[gi].xi, Objective::Measure, step0, cfg.refine_iters,
                                     rep.newton_tol, -1.0, domain.box);
  const double gdm = measure_at(psi, gd.xi);
  rep.global_min_m = std::min(m[gi], gdm);
  rep.global_min_xi = gdm < m[gi] ? gd.xi : mesh.samples[gi].xi;

  rep.min_hgrad = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (std::isnan(m[i])) continue;
    const double h = mesh.samples[i].grad.horizontal->norm();
    if (h < rep.min_hgrad) {
      rep.min_hgrad = h;
      rep.min_hgrad_xi = mesh.samples[i].xi;
    }
  }
  for (const auto& c : refined) {
    if (c.m < rep.global_min_m) {
      rep.global_min_m = c.m;
      rep.global_min_xi = c.xi;
    }
    const double h = horizontal_of(psi, c.xi).norm();
    if (h < rep.min_hgrad) {
      rep.min_hgrad = h;
      rep.min_hgrad_xi = c.xi;
    }
  }

  classify(std::move(refined), rep);
  rep.timings["refine"] = seconds_since(t0);
  rep.timings["total"] = seconds_since(t_start);
  return rep;
}

}  // namespace heischar
