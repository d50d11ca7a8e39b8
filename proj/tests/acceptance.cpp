// Acceptance driver: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heischar/char_analysis.hpp"
#include "heischar/cli.hpp"
#include "heischar/kernels.hpp"
#include "heischar/report.hpp"
#include "heischar/torus_map.hpp"

using namespace heischar;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double sin_angle(const Vec3& a, const Vec3& b) { return a.normalized().cross(b.normalized()).norm(); }

ScanConfig grid_config(int grid, Exec exec = Exec::Parallel) {
  ScanConfig c;
  c.grid = grid;
  c.exec = exec;
  return c;
}

Profile rounded_triangle() { return rounded_polygon_profile({{0.0, 2.0}, {2.0, 2.0}, {1.0, 3.5}}, 0.25); }

/// Largest distance from a point of `b` to its nearest point of `a`, both ways.
double set_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto one_way = [](const std::vector<Vec3>& p, const std::vector<Vec3>& q) {
    double worst = 0.0;
    for (const Vec3& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& y : q) best = std::min(best, (x - y).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

std::vector<Vec3> points_of(const std::vector<CharPoint>& cs) {
  std::vector<Vec3> out;
  for (const auto& c : cs) out.push_back(c.xi);
  return out;
}

Outcome koranyi_two_points() {
  const auto t0 = Clock::now();
  const CharacteristicReport r = scan(koranyi_ball(HPoint{}, 1.0), grid_config(64, Exec::Serial));
  const double secs = seconds_since(t0);
  const HPoint north(0.0, 0.0, 1.0), south(0.0, 0.0, -1.0);
  int n = 0, s = 0;
  double worst_oracle = 0.0;
  for (const auto& c : r.characteristic) {
    const HPoint p = HPoint::from_vec3(c.xi);
    n += distance(p, north) <= 1e-6;
    s += distance(p, south) <= 1e-6;
    // |grad_H phi|^2 = 16 |z|^2 rho^4 at the located point.
    const double z2 = p.z_norm_sq();
    const double oracle = 16.0 * z2 * std::pow(gauge(p), 4);
    const Vec3 g = koranyi_ball(HPoint{}, 1.0).psi.gradient(c.xi);
    worst_oracle = std::max(worst_oracle, std::abs(h1::horizontal(g, c.xi).squaredNorm() - oracle));
  }
  const bool ok = r.characteristic.size() == 2 && n == 1 && s == 1 && worst_oracle <= 1e-12 && secs < 10.0;
  return {ok, fmt::format("{} points, near (0,0,1): {}, near (0,0,-1): {}, oracle gap {:.1e}, {:.2f} s serial",
                          r.characteristic.size(), n, s, worst_oracle, secs)};
}

Outcome torus_non_characteristic() {
  const auto t0 = Clock::now();
  const TorusDomain torus = TorusDomain::make(disc_profile(1.0, 2.0, 1.0));
  ScanConfig cfg;
  cfg.n_s = 256;
  cfg.n_theta = 64;
  cfg.exec = Exec::Serial;
  const CharacteristicReport r = scan(torus, cfg);
  const double bound = disc_certificate(1.0, 2.0, 1.0).min_hgrad;
  const double rel = std::abs(r.min_hgrad - bound) / bound;
  const ConvexCertificate cert = certify_convex(ConvexProfile::make(torus.profile()), 10000);
  const double secs = seconds_since(t0);
  const bool ok = r.characteristic.empty() && rel <= 0.01 && cert.pass && cert.dim_one == 10000 && secs < 5.0;
  return {ok, fmt::format("{} points, min |grad_H| = {:.9f} vs {} ({:.1e} rel), certificate {} {}/{}, {:.2f} s",
                          r.characteristic.size(), r.min_hgrad, bound, rel, cert.pass ? "PASS" : "FAIL", cert.dim_one,
                          cert.n_samples, secs)};
}

Outcome sphere_has_characteristic_points() {
  // Oracle: (x, y, t - 5) parallel to (-2y, 2x, 1) gives x = -4 lambda^2 x, so z = 0 and t = 5 +- 1.
  // Confirm by bisection on the meridian t = 5 + cos a, x = sin a of the angle to the contact covector.
  std::vector<Vec3> roots;
  auto f = [](double a) {
    const Vec3 p(std::sin(a), 0.0, 5.0 + std::cos(a));
    const Vec3 n(p[0], p[1], p[2] - 5.0);
    const Vec3 c = h1::contact_covector(p);
    return n[0] * c[2] - n[2] * c[0];  // y-component of n x c
  };
  for (int k = 0; k < 720; ++k) {
    double lo = -0.1 + 2.0 * std::numbers::pi * k / 720, hi = lo + 2.0 * std::numbers::pi / 720;
    if (std::signbit(f(lo)) == std::signbit(f(hi))) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (std::signbit(f(lo)) == std::signbit(f(mid)) ? lo : hi) = mid;
    }
    const double a = 0.5 * (lo + hi);
    roots.emplace_back(std::sin(a), 0.0, 5.0 + std::cos(a));
  }
  const ImplicitDomain ball = euclidean_ball(Vec3(0.0, 0.0, 5.0), 1.0);
  const CharacteristicReport r = scan(ball, grid_config(64));
  double worst = 0.0;
  for (const auto& c : r.characteristic) worst = std::max(worst, sin_angle(c.xi - Vec3(0.0, 0.0, 5.0), h1::contact_covector(c.xi)));
  const double gap = r.characteristic.empty() ? INFINITY : set_distance(points_of(r.characteristic), roots);
  const bool ok = !r.characteristic.empty() && worst <= 1e-6 && gap <= 1e-6;
  return {ok, fmt::format("{} points (1-D oracle roots: {}), oracle angle {:.1e}, distance to roots {:.1e}",
                          r.characteristic.size(), roots.size(), worst, gap)};
}

Outcome criterion_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t checked = 0, disagree = 0, characteristic = 0;
  auto check = [&](const AmbientField& psi, const Vec3& xi) {
    const bool small = char_measure(psi, xi) < 1e-6;
    const bool dim2 = tangent_frame(psi, xi, 1e-6).intersection_dim == 2;
    ++checked;
    characteristic += small;
    disagree += small != dim2;
  };
  for (const Profile& p : {disc_profile(1.0, 2.0, 1.0), ellipse_profile(0.0, 3.0, 2.0, 1.0), rounded_triangle()}) {
    const TorusDomain t = TorusDomain::make(p);
    for (int k = 0; k < 2000; ++k) check(t.psi(), t.boundary_point(unit(rng), 2.0 * std::numbers::pi * unit(rng)));
  }
  for (const ImplicitDomain& d : {koranyi_ball(HPoint{}, 1.0), koranyi_ball(HPoint(0.2, -0.1, 0.3), 1.5),
                                  euclidean_ball(Vec3(0.0, 0.0, 5.0), 1.0)}) {
    const BoundaryMesh mesh = boundary_mesh(d, 8);
    int added = 0;
    while (added < 2000) {
      const Vec3 seed = d.box.lo + Vec3(unit(rng), unit(rng), unit(rng)).cwiseProduct(d.box.extent());
      const auto pr = kernels::project_point(d.psi, seed, 1e-10 * mesh.scale);
      if (!pr.converged || !d.box.contains(pr.point)) continue;
      check(d.psi, pr.point);
      ++added;
    }
    for (const auto& c : scan(d, grid_config(48)).characteristic) check(d.psi, c.xi);
  }
  return {checked >= 10000 && disagree == 0 && characteristic > 0,
          fmt::format("{} samples ({} characteristic), {} disagreements", checked, characteristic, disagree)};
}

AmbientField wobble(const Box<3>& box) {
  return AmbientField([](const Vec3& p) { return 1.0 + 0.3 * std::sin(p[0] + 2.0 * p[1] - p[2]); }, box,
                      [](const Vec3& p) {
                        const double c = 0.3 * std::cos(p[0] + 2.0 * p[1] - p[2]);
                        return Vec3(c, 2.0 * c, -c);
                      });
}

Outcome defining_independence() {
  double worst_m = 0.0, worst_set = 0.0;
  std::size_t samples = 0;
  bool same_count = true;
  for (const ImplicitDomain& d : {koranyi_ball(HPoint{}, 1.0), koranyi_ball(HPoint(0.1, 0.2, -0.3), 1.0),
                                  euclidean_ball(Vec3(0.0, 0.0, 5.0), 1.0)}) {
    const ImplicitDomain scaled = rescaled_defining(d, wobble(d.box), "wobble");
    const CharacteristicReport a = scan(d, grid_config(64));
    const CharacteristicReport b = scan(scaled, grid_config(64));
    for (const auto& s : a.samples) {
      worst_m = std::max(worst_m, std::abs(char_measure(d.psi, s.xi) - char_measure(scaled.psi, s.xi)));
      ++samples;
    }
    same_count = same_count && a.characteristic.size() == b.characteristic.size() && !a.characteristic.empty();
    if (same_count) worst_set = std::max(worst_set, set_distance(points_of(a.characteristic), points_of(b.characteristic)));
  }
  for (const Profile& p : {disc_profile(1.0, 2.0, 1.0), ellipse_profile(0.0, 3.0, 2.0, 1.0)}) {
    const TorusDomain t = TorusDomain::make(p);
    const AmbientField h = wobble(t.box());
    const AmbientField scaled = scale_by(h, t.psi());
    for (const auto& s : boundary_mesh(t, 128, 16).samples) {
      worst_m = std::max(worst_m, std::abs(char_measure(t.psi(), s.xi) - char_measure(scaled, s.xi)));
      ++samples;
    }
  }
  const bool ok = worst_m <= 1e-9 && same_count && worst_set <= 1e-8;
  return {ok, fmt::format("{} samples, max |m - m'| = {:.1e}, characteristic sets {} (gap {:.1e})", samples, worst_m,
                          same_count ? "match" : "differ", worst_set)};
}

Outcome diffeomorphism() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double rt = 0.0, jac = 0.0, smin = INFINITY;
  int n = 0;
  while (n < 100000) {
    const HPoint p(u(rng), u(rng), u(rng));
    if (std::sqrt(p.z_norm_sq()) < 0.1) continue;
    ++n;
    rt = std::max(rt, (F_inv(F(p)).to_vec3() - p.to_vec3()).cwiseAbs().maxCoeff());
    const ProductPoint q = F(p);
    const ProductPoint q2 = F(F_inv(q));
    rt = std::max({rt, (q2.w - q.w).cwiseAbs().maxCoeff(), (q2.u - q.u).cwiseAbs().maxCoeff()});
    jac = std::max(jac, (TF_matrix(p) - F_jacobian_fd(p)).cwiseAbs().maxCoeff());
    smin = std::min(smin, TF_singular_values(p)[2]);
  }
  const bool ok = rt <= 1e-12 && jac <= 1e-7 && smin > 0.0;
  return {ok, fmt::format("{} points, round trip {:.1e}, Jacobian gap {:.1e}, min singular value {:.3f}", n, rt, jac,
                          smin)};
}

Outcome convex_homeomorphism() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  bool injective = true;
  for (const Profile& p : {disc_profile(1.0, 2.0, 1.0), ellipse_profile(0.0, 3.0, 2.0, 1.0), rounded_triangle()}) {
    const ConvexProfile cp = ConvexProfile::make(p);
    for (int k = 0; k < 1000; ++k) {
      const double rad = cp.r() * std::sqrt(unit(rng)), ang = 2.0 * std::numbers::pi * unit(rng);
      const Vec2 Y = cp.A() + rad * Vec2(std::cos(ang), std::sin(ang));
      worst = std::max(worst, (cp.H_map(cp.G_map(Y)) - Y).norm());
    }
    const Box<2>& e = p.extent();
    for (int k = 0; k < 1000;) {
      const Vec2 X = e.lo + Vec2(unit(rng), unit(rng)).cwiseProduct(e.extent());
      if (!(p.implicit().value(X) < 0.0)) continue;
      worst = std::max(worst, (cp.G_map(cp.H_map(X)) - X).norm());
      ++k;
    }
    injective = injective && g_injectivity(cp).ok;
  }
  bool rejected = false;
  try {
    ConvexProfile::make(crescent_profile(0.0, 3.0, 1.0, 0.8, 0.5));
  } catch (const ValidationError&) {
    rejected = true;
  }
  bool multi = false;
  try {
    radial_boundary(crescent_profile(0.0, 3.0, 1.0, 0.8, 0.5), Vec2(0.6, 3.75), Vec2(0.0, -1.0));
  } catch (const DomainError&) {
    multi = true;
  }
  const bool ok = worst <= 1e-9 && injective && rejected && multi;
  return {ok, fmt::format("round trips {:.1e}, injective {}, crescent rejected {}, multi-crossing reported {}", worst,
                          injective, rejected, multi)};
}

Outcome algebra() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto rnd = [&] { return HPoint(u(rng), u(rng), u(rng)); };
  double axioms = 0.0, fd = 0.0, homog = 0.0, siegel = 0.0, cr = 0.0;
  bool exact_frame = true, exact_contact = true;
  const std::complex<double> I(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const HPoint g = rnd(), p = rnd(), q = rnd();
    const Vec3 a = group_mul(group_mul(g, p), q).to_vec3(), b = group_mul(g, group_mul(p, q)).to_vec3();
    axioms = std::max({axioms, (a - b).cwiseAbs().maxCoeff(),
                       (group_mul(p, group_inv(p)).to_vec3()).cwiseAbs().maxCoeff(),
                       (group_mul(HPoint::origin(), p).to_vec3() - p.to_vec3()).cwiseAbs().maxCoeff()});

    const Frame fp = frame_at(p), fgp = frame_at(group_mul(g, p));
    exact_frame = exact_frame && left_translate_push(g, fp.X[0]).to_vec3() == fgp.X[0].to_vec3() &&
                  left_translate_push(g, fp.Y[0]).to_vec3() == fgp.Y[0].to_vec3();
    const double h = 1e-5;
    const Vec3 gv = g.to_vec3(), pv = p.to_vec3();
    for (const Vec3& v : {h1::X(pv), h1::Y(pv)}) {
      const Vec3 moved = (h1::mul(gv, pv + h * v) - h1::mul(gv, pv - h * v)) / (2.0 * h);
      const Vec3 expect = v[0] == 1.0 ? h1::X(h1::mul(gv, pv)) : h1::Y(h1::mul(gv, pv));
      fd = std::max(fd, (moved - expect).norm());
    }

    for (double lambda : {0.5, 2.0, 3.0}) {
      const double r = gauge(p);
      homog = std::max(homog, std::abs(gauge(dilate(lambda, p)) - lambda * r) / std::max(r, 1e-300));
    }

    exact_contact = exact_contact && contact_form(p, fp.X[0]) == 0.0 && contact_form(p, fp.Y[0]) == 0.0 &&
                    contact_form(p, fp.T) == 1.0;

    const SiegelPoint lhs = siegel_embed(group_mul(g, p)), rhs = siegel_action(g, siegel_embed(p));
    for (std::size_t j = 0; j < lhs.size(); ++j) siegel = std::max(siegel, std::abs(lhs[j] - rhs[j]));

    auto w = [](const Vec3& x) { return std::complex<double>(x[2], x[0] * x[0] + x[1] * x[1]); };
    auto d = [&](int i) {
      Vec3 a1 = pv, b1 = pv;
      a1[i] += h;
      b1[i] -= h;
      return (w(a1) - w(b1)) / (2.0 * h);
    };
    const std::complex<double> z(pv[0], pv[1]);
    cr = std::max(cr, std::abs(0.5 * (d(0) + I * d(1)) - I * z * d(2)));
  }
  const bool ok = axioms <= 1e-12 && exact_frame && fd <= 1e-8 && homog <= 1e-12 && exact_contact && siegel <= 1e-12 &&
                  cr <= 1e-9;
  return {ok, fmt::format("axioms {:.1e}, frame exact {}, frame FD {:.1e}, homogeneity {:.1e}, contact exact {}, "
                          "Siegel {:.1e}, Zbar w {:.1e}",
                          axioms, exact_frame, fd, homog, exact_contact, siegel, cr)};
}

Outcome dilation_covariance() {
  double worst = 0.0;
  bool counts = true;
  for (const HPoint& c : {HPoint{}, HPoint(0.2, -0.1, 0.3)}) {
    const CharacteristicReport base = scan(koranyi_ball(c, 1.0), grid_config(64));
    counts = counts && base.characteristic.size() == 2;
    for (double lambda : {0.5, 2.0, 3.0}) {
      const CharacteristicReport d = scan(koranyi_ball(dilate(lambda, c), lambda), grid_config(64));
      counts = counts && d.characteristic.size() == base.characteristic.size();
      std::vector<Vec3> expect;
      for (const auto& p : base.characteristic) expect.push_back(h1::dilate(lambda, p.xi));
      worst = std::max(worst, set_distance(points_of(d.characteristic), expect));
    }
  }
  return {counts && worst <= 1e-8, fmt::format("lambda in {{0.5, 2, 3}}, max Euclidean gap {:.1e}", worst)};
}

Outcome reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "heischar_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::vector<std::string>> runs{
      {"scan", "--domain", "koranyi-ball", "--grid", "48", "--seed", "11"},
      {"scan", "--domain", "torus", "--ns", "128", "--ntheta", "32", "--samples-in-json", "--seed", "11"},
      {"certify", "--profile", "ellipse", "--center", "0,3", "--samples", "2000", "--seed", "11"},
      {"profile-map", "--profile", "polygon", "--samples", "500", "--seed", "11"}};
  int identical = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::string bytes[2];
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<std::string> args = runs[k];
      const fs::path out = dir / fmt::format("run{}_{}.json", k, rep);
      args.insert(args.begin(), "heischar");
      args.insert(args.end(), {"--out", out.string()});
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      const auto parsed = cli::parse_args(static_cast<int>(argv.size()), argv.data());
      std::ostringstream so, se;
      if (!parsed.config || cli::run(*parsed.config, so, se) != 0) return {false, "run failed: " + se.str()};
      bytes[rep] = report::without_run_info(report::read_json(out)).dump(2);
    }
    identical += bytes[0] == bytes[1];
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(runs.size()),
          fmt::format("{}/{} commands byte-identical without the run block", identical, runs.size())};
}

}  // namespace

int main() {
  kernels::configure_threads();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Koranyi ball: exactly two characteristic points at the poles", koranyi_two_points},
      {"Heisenberg torus: none found, disc bound matched, convex certificate PASS", torus_non_characteristic},
      {"Sphere-boundary domain: non-empty characteristic set", sphere_has_characteristic_points},
      {"Criterion equivalence: m < 1e-6 iff intersection dimension 2", criterion_equivalence},
      {"Defining-function independence under h * Psi", defining_independence},
      {"Diffeomorphism suite for F", diffeomorphism},
      {"Convex homeomorphism suite", convex_homeomorphism},
      {"Algebra suite", algebra},
      {"Dilation covariance of characteristic sets", dilation_covariance},
      {"Reproducible JSON for identical config and seed", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("{} [{}] {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
