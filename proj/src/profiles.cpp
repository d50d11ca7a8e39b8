#include "heischar/profiles.hpp"

#include <fmt/core.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "heischar/expression.hpp"
#include "heischar/kernels.hpp"

namespace heischar {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCurveSamples = 1024;
constexpr int kSimplicitySamples = 512;

double cross2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross2(p2 - p1, q1 - p1);
  const double d2 = cross2(p2 - p1, q2 - p1);
  const double d3 = cross2(q2 - q1, p1 - q1);
  const double d4 = cross2(q2 - q1, p2 - q1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

Box<2> bounding_box(const std::vector<Vec2>& pts) {
  Box<2> b{pts.front(), pts.front()};
  for (const Vec2& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

Box<2> planar_search_box(const Box<2>& extent) {
  Box<2> box = extent.expanded(2.0);
  box.lo[1] = std::min(box.lo[1], 0.0);
  return box;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double constant_value(const std::string& text, const Expression::Constants& constants) {
  const Expression e = Expression::parse(text, constants);
  if (e.uses_variables()) {
    throw ValidationError(fmt::format("profile file: '{}' must not depend on a or b", text));
  }
  return e.evaluate(0.0, 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Profile

Profile Profile::make(std::string kind, Params params, PlanarField implicit,
                      std::optional<BoundaryCurve> curve, std::optional<double> y_min) {
  Profile p(std::move(kind), std::move(params), std::move(implicit), std::move(curve));
  double sampled_min = 0.0;
  if (p.curve_) {
    std::vector<Vec2> pts(kCurveSamples);
    for (int i = 0; i < kCurveSamples; ++i) pts[i] = p.curve_->point(static_cast<double>(i) / kCurveSamples);
    p.extent_ = bounding_box(pts);
    sampled_min = p.extent_.lo[1];

    double max_grad = 0.0;
    for (const Vec2& q : pts) max_grad = std::max(max_grad, p.implicit_.gradient(q).norm());
    const double scale = std::max(1.0, max_grad * p.extent_.diameter());
    for (int i = 0; i < kCurveSamples; ++i) {
      const double v = p.implicit_.value(pts[i]);
      if (!(std::abs(v) <= 1e-8 * scale)) {
        throw ValidationError(fmt::format(
            "profile '{}': curve and implicit field disagree at s = {} (|u| = {})", p.kind_,
            static_cast<double>(i) / kCurveSamples, std::abs(v)));
      }
    }

    std::vector<Vec2> poly(kSimplicitySamples);
    for (int i = 0; i < kSimplicitySamples; ++i) {
      poly[i] = p.curve_->point(static_cast<double>(i) / kSimplicitySamples);
    }
    for (int i = 0; i < kSimplicitySamples; ++i) {
      const Vec2& a1 = poly[i];
      const Vec2& a2 = poly[(i + 1) % kSimplicitySamples];
      for (int j = i + 2; j < kSimplicitySamples; ++j) {
        if (i == 0 && j == kSimplicitySamples - 1) continue;
        if (segments_cross(a1, a2, poly[j], poly[(j + 1) % kSimplicitySamples])) {
          throw ValidationError(fmt::format("profile '{}': boundary curve self-intersects", p.kind_));
        }
      }
    }
  } else {
    constexpr int n = 256;
    const Box<2>& box = p.implicit_.box();
    const Vec2 h = box.extent() / n;
    bool found = false;
    Box<2> ext{};
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Vec2 q = box.lo + Vec2(i * h[0], j * h[1]);
        if (!(p.implicit_.value(q) <= 0.0)) continue;
        if (i == 0 || j == 0 || i == n || j == n) {
          throw ValidationError(
              fmt::format("profile '{}': region reaches the edge of its search box", p.kind_));
        }
        if (!found) {
          ext = {q, q};
          found = true;
        }
        ext.lo = ext.lo.cwiseMin(q);
        ext.hi = ext.hi.cwiseMax(q);
      }
    }
    if (!found) throw ValidationError(fmt::format("profile '{}': empty region", p.kind_));
    ext.lo -= h;
    ext.hi += h;
    p.extent_ = ext;
    sampled_min = ext.lo[1];
  }
  p.y_min_ = y_min.value_or(sampled_min);
  return p;
}

std::string Profile::description() const {
  std::vector<std::string> parts;
  for (const auto& [k, v] : params_) parts.push_back(fmt::format("{}={}", k, v));
  return fmt::format("{}({})", kind_, fmt::join(parts, ", "));
}

Vec2 Profile::curve_normal(double s) const {
  if (!curve_) throw ValidationError("profile has no boundary curve");
  const Vec2 t = curve_->tangent(s).normalized();
  return {t[1], -t[0]};
}

Profile disc_profile(double a1, double a2, double r) {
  if (!(r > 0.0)) throw ValidationError("disc radius must be positive");
  const Vec2 c(a1, a2);
  PlanarField u(
      [c, r](const Vec2& w) { return (w - c).squaredNorm() - r * r; },
      planar_search_box({c - Vec2(r, r), c + Vec2(r, r)}),
      [c](const Vec2& w) { return Vec2(2.0 * (w - c)); },
      [](const Vec2&) { return Eigen::Matrix2d(2.0 * Eigen::Matrix2d::Identity()); });
  BoundaryCurve curve{
      [c, r](double s) { return Vec2(c + r * Vec2(std::cos(kTwoPi * s), std::sin(kTwoPi * s))); },
      [r](double s) { return Vec2(kTwoPi * r * Vec2(-std::sin(kTwoPi * s), std::cos(kTwoPi * s))); }};
  return Profile::make("disc", {{"a1", a1}, {"a2", a2}, {"r", r}}, std::move(u), std::move(curve),
                       a2 - r);
}

Profile ellipse_profile(double a1, double a2, double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw ValidationError("ellipse semi-axes must be positive");
  const Vec2 c(a1, a2);
  const Vec2 inv_sq(1.0 / (r1 * r1), 1.0 / (r2 * r2));
  PlanarField u(
      [c, inv_sq](const Vec2& w) {
        const Vec2 d = w - c;
        return d[0] * d[0] * inv_sq[0] + d[1] * d[1] * inv_sq[1] - 1.0;
      },
      planar_search_box({c - Vec2(r1, r2), c + Vec2(r1, r2)}),
      [c, inv_sq](const Vec2& w) { return Vec2(2.0 * (w - c).cwiseProduct(inv_sq)); },
      [inv_sq](const Vec2&) { return Eigen::Matrix2d(Eigen::Vector2d(2.0 * inv_sq).asDiagonal()); });
  BoundaryCurve curve{
      [c, r1, r2](double s) {
        return Vec2(c + Vec2(r1 * std::cos(kTwoPi * s), r2 * std::sin(kTwoPi * s)));
      },
      [r1, r2](double s) {
        return Vec2(kTwoPi * Vec2(-r1 * std::sin(kTwoPi * s), r2 * std::cos(kTwoPi * s)));
      }};
  return Profile::make("ellipse", {{"a1", a1}, {"a2", a2}, {"r1", r1}, {"r2", r2}}, std::move(u),
                       std::move(curve), a2 - r2);
}

namespace {

// Boundary of a convex polygon thickened by a disc: offset edges joined by
// circular arcs, parametrized by normalized arc length.
struct RoundedPolygon {
  std::vector<Vec2> v;  // counter-clockwise
  double rho = 0.0;
  std::vector<Vec2> normals;
  std::vector<double> breaks;  // cumulative length at the start of each piece (2 per vertex)
  double length = 0.0;

  RoundedPolygon(std::vector<Vec2> vertices, double rounding) : v(std::move(vertices)), rho(rounding) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e = v[(i + 1) % n] - v[i];
      normals.push_back(Vec2(e[1], -e[0]).normalized());
    }
    for (std::size_t i = 0; i < n; ++i) {
      breaks.push_back(length);
      length += (v[(i + 1) % n] - v[i]).norm();
      breaks.push_back(length);
      length += rho * turn_angle(i);
    }
  }

  double turn_angle(std::size_t i) const {
    const Vec2& a = normals[i];
    const Vec2& b = normals[(i + 1) % v.size()];
    return std::atan2(cross2(a, b), a.dot(b));
  }

  std::pair<Vec2, Vec2> eval(double s) const {
    const std::size_t n = v.size();
    double ell = (s - std::floor(s)) * length;
    std::size_t piece = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), ell) -
                                                 breaks.begin()) - 1;
    piece = std::min(piece, 2 * n - 1);
    const double local = ell - breaks[piece];
    const std::size_t i = piece / 2;
    if (piece % 2 == 0) {
      const Vec2 e = (v[(i + 1) % n] - v[i]).normalized();
      return {v[i] + rho * normals[i] + local * e, e * length};
    }
    const double ang0 = std::atan2(normals[i][1], normals[i][0]);
    const double ang = ang0 + local / rho;
    const Vec2 dir(std::cos(ang), std::sin(ang));
    return {v[(i + 1) % n] + rho * dir, Vec2(-dir[1], dir[0]) * length};
  }

  // Signed distance to the core polygon and its gradient.
  std::pair<double, Vec2> sdf(const Vec2& p) const {
    const std::size_t n = v.size();
    double best = std::numeric_limits<double>::infinity();
    Vec2 closest = v[0];
    std::size_t best_edge = 0;
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = v[i];
      const Vec2 e = v[(i + 1) % n] - a;
      if (cross2(e, p - a) < 0.0) inside = false;
      const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
      const Vec2 q = a + t * e;
      const double d = (p - q).norm();
      if (d < best) {
        best = d;
        closest = q;
        best_edge = i;
      }
    }
    const Vec2 dir = best > 0.0 ? Vec2((p - closest) / best) : normals[best_edge];
    return inside ? std::pair{-best, Vec2(-dir)} : std::pair{best, dir};
  }
};

}  // namespace

Profile rounded_polygon_profile(std::vector<Vec2> vertices, double rounding) {
  if (vertices.size() < 3) throw ValidationError("polygon needs at least three vertices");
  if (!(rounding > 0.0)) throw ValidationError("polygon rounding radius must be positive");
  double area = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    area += cross2(vertices[i], vertices[(i + 1) % vertices.size()]);
  }
  if (area < 0.0) std::reverse(vertices.begin(), vertices.end());
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = vertices[(i + 1) % n] - vertices[i];
    const Vec2 e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    if (!(cross2(e1, e2) > 0.0)) throw ValidationError("polygon vertices must form a strictly convex polygon");
  }
  auto shape = std::make_shared<const RoundedPolygon>(vertices, rounding);
  Box<2> core = bounding_box(vertices);
  Box<2> ext{core.lo - Vec2(rounding, rounding), core.hi + Vec2(rounding, rounding)};
  PlanarField u([shape](const Vec2& w) { return shape->sdf(w).first - shape->rho; },
                planar_search_box(ext), [shape](const Vec2& w) { return shape->sdf(w).second; });
  BoundaryCurve curve{[shape](double s) { return shape->eval(s).first; },
                      [shape](double s) { return shape->eval(s).second; }};
  Params params{{"rounding", rounding}, {"vertices", static_cast<double>(n)}};
  for (std::size_t i = 0; i < n; ++i) {
    params[fmt::format("v{}_a", i)] = vertices[i][0];
    params[fmt::format("v{}_b", i)] = vertices[i][1];
  }
  return Profile::make("polygon", std::move(params), std::move(u), std::move(curve),
                       core.lo[1] - rounding);
}

Profile crescent_profile(double a1, double a2, double r_outer, double offset, double r_inner) {
  if (!(r_outer > 0.0) || !(r_inner > 0.0) || !(offset > 0.0)) {
    throw ValidationError("crescent radii and offset must be positive");
  }
  if (!(offset > std::abs(r_outer - r_inner) && offset < r_outer + r_inner)) {
    throw ValidationError("crescent circles must cross");
  }
  const Vec2 c(a1, a2);
  const Vec2 ci(a1 + offset, a2);
  // Upper crossing point relative to the outer centre.
  const double xs = (offset * offset + r_outer * r_outer - r_inner * r_inner) / (2.0 * offset);
  const double ys = std::sqrt(r_outer * r_outer - xs * xs);
  const double alpha = std::atan2(ys, xs);           // on the outer circle
  const double beta = std::atan2(ys, xs - offset);   // on the inner circle
  PlanarField u(
      [c, ci, r_outer, r_inner](const Vec2& w) {
        return std::max((w - c).squaredNorm() - r_outer * r_outer,
                        r_inner * r_inner - (w - ci).squaredNorm());
      },
      planar_search_box({c - Vec2(r_outer, r_outer), c + Vec2(r_outer, r_outer)}),
      [c, ci, r_outer, r_inner](const Vec2& w) {
        const double outer = (w - c).squaredNorm() - r_outer * r_outer;
        const double inner = r_inner * r_inner - (w - ci).squaredNorm();
        return outer >= inner ? Vec2(2.0 * (w - c)) : Vec2(-2.0 * (w - ci));
      });
  // s in [0, 1/2): outer arc from alpha to 2 pi - alpha; s in [1/2, 1): inner arc
  // from 2 pi - beta back to beta (clockwise).
  const double outer_span = kTwoPi - 2.0 * alpha;
  const double inner_span = kTwoPi - 2.0 * beta;
  BoundaryCurve curve{
      [=](double s) {
        s -= std::floor(s);
        if (s < 0.5) {
          const double ang = alpha + 2.0 * s * outer_span;
          return Vec2(c + r_outer * Vec2(std::cos(ang), std::sin(ang)));
        }
        const double ang = (kTwoPi - beta) - 2.0 * (s - 0.5) * inner_span;
        return Vec2(ci + r_inner * Vec2(std::cos(ang), std::sin(ang)));
      },
      [=](double s) {
        s -= std::floor(s);
        if (s < 0.5) {
          const double ang = alpha + 2.0 * s * outer_span;
          return Vec2(2.0 * outer_span * r_outer * Vec2(-std::sin(ang), std::cos(ang)));
        }
        const double ang = (kTwoPi - beta) - 2.0 * (s - 0.5) * inner_span;
        return Vec2(-2.0 * inner_span * r_inner * Vec2(-std::sin(ang), std::cos(ang)));
      }};
  return Profile::make("crescent",
                       {{"a1", a1}, {"a2", a2}, {"r_outer", r_outer}, {"offset", offset}, {"r_inner", r_inner}},
                       std::move(u), std::move(curve));
}

Profile half_disc_profile() {
  PlanarField u(
      [](const Vec2& w) { return std::max(w.squaredNorm() - 1.0, -w[1]); },
      Box<2>{Vec2(-2.0, -1.0), Vec2(2.0, 2.0)},
      [](const Vec2& w) { return w.squaredNorm() - 1.0 >= -w[1] ? Vec2(2.0 * w) : Vec2(0.0, -1.0); });
  BoundaryCurve curve{
      [](double s) {
        s -= std::floor(s);
        if (s < 0.5) return Vec2(std::cos(kTwoPi * s), std::sin(kTwoPi * s));
        return Vec2(-1.0 + 4.0 * (s - 0.5), 0.0);
      },
      [](double s) {
        s -= std::floor(s);
        if (s < 0.5) return Vec2(kTwoPi * Vec2(-std::sin(kTwoPi * s), std::cos(kTwoPi * s)));
        return Vec2(4.0, 0.0);
      }};
  return Profile::make("half-disc", {}, std::move(u), std::move(curve), 0.0);
}

Profile expression_profile(const std::string& expression, const Box<2>& box,
                           const std::map<std::string, double, std::less<>>& constants) {
  const Expression e = Expression::parse(expression, constants);
  Params params;
  for (const auto& [k, v] : constants) params[k] = v;
  Profile p = Profile::make("implicit", std::move(params), expression_field(e, box), std::nullopt);
  return p;
}

Profile parse_profile_spec(std::string_view text) {
  Expression::Constants constants;
  std::optional<Profile> profile;
  std::optional<std::string> implicit;
  std::optional<Box<2>> box;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> void {
    throw ValidationError(fmt::format("profile file line {}: {}", line_no, what));
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.rfind("let ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected 'let NAME = EXPR'");
      const std::string name = trim(line.substr(4, eq - 4));
      if (name.empty() || name == "a" || name == "b") fail("invalid constant name");
      constants[name] = constant_value(line.substr(eq + 1), constants);
      continue;
    }
    if (line.rfind("box", 0) == 0 && (line.size() == 3 || std::isspace(static_cast<unsigned char>(line[3])))) {
      const auto items = split(line.substr(3), ',');
      if (items.size() != 4) fail("expected 'box A0, A1, B0, B1'");
      Box<2> b{Vec2(constant_value(items[0], constants), constant_value(items[2], constants)),
               Vec2(constant_value(items[1], constants), constant_value(items[3], constants))};
      if (!(b.lo.array() < b.hi.array()).all()) fail("box bounds must be increasing");
      box = b;
      continue;
    }
    if (line.rfind("implicit", 0) == 0) {
      if (profile || implicit) fail("more than one profile statement");
      implicit = trim(line.substr(8));
      if (implicit->empty()) fail("missing implicit expression");
      continue;
    }
    const auto open = line.find('(');
    const auto close = line.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open || close != line.size() - 1) {
      fail(fmt::format("unrecognized statement '{}'", line));
    }
    if (profile || implicit) fail("more than one profile statement");
    const std::string name = trim(line.substr(0, open));
    const auto groups = split(line.substr(open + 1, close - open - 1), ';');
    std::vector<double> flat;
    std::vector<std::vector<double>> grouped;
    for (const auto& g : groups) {
      grouped.emplace_back();
      for (const auto& item : split(g, ',')) {
        if (item.empty()) fail("empty argument");
        const double v = constant_value(item, constants);
        flat.push_back(v);
        grouped.back().push_back(v);
      }
    }
    if (name == "disc") {
      if (flat.size() != 3) fail("disc(a1, a2, r) takes three arguments");
      profile = disc_profile(flat[0], flat[1], flat[2]);
    } else if (name == "ellipse") {
      if (flat.size() != 4) fail("ellipse(a1, a2, r1, r2) takes four arguments");
      profile = ellipse_profile(flat[0], flat[1], flat[2], flat[3]);
    } else if (name == "crescent") {
      if (flat.size() != 5) fail("crescent(a1, a2, R, d, r) takes five arguments");
      profile = crescent_profile(flat[0], flat[1], flat[2], flat[3], flat[4]);
    } else if (name == "polygon") {
      if (grouped.size() < 4 || grouped[0].size() != 1) {
        fail("polygon(rounding; x1, y1; x2, y2; x3, y3; ...) needs a rounding radius and three vertices");
      }
      std::vector<Vec2> verts;
      for (std::size_t i = 1; i < grouped.size(); ++i) {
        if (grouped[i].size() != 2) fail("polygon vertices are 'x, y' pairs");
        verts.emplace_back(grouped[i][0], grouped[i][1]);
      }
      profile = rounded_polygon_profile(std::move(verts), grouped[0][0]);
    } else {
      fail(fmt::format("unknown built-in profile '{}'", name));
    }
  }
  if (implicit) {
    if (!box) throw ValidationError("profile file: 'implicit' needs a 'box A0, A1, B0, B1' line");
    return expression_profile(*implicit, *box, constants);
  }
  if (!profile) throw ValidationError("profile file: no profile statement");
  return *profile;
}

Profile load_profile_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read profile file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_profile_spec(ss.str());
}

// ---------------------------------------------------------------------------
// TorusDomain

TorusDomain TorusDomain::make(Profile profile) {
  if (!(profile.y_min() > 0.0)) {
    throw ValidationError(fmt::format(
        "profile '{}' touches {{y = 0}} (y_min = {}); its lift would meet the center", profile.kind(),
        profile.y_min()));
  }
  AmbientField psi = compose_profile(profile.implicit());
  TorusDomain d(std::move(profile), psi);
  d.psi_ = psi.with_box(d.box());
  return d;
}

Vec3 TorusDomain::boundary_point(double s, double theta) const {
  if (!profile_.has_curve()) {
    throw ValidationError("torus domain has no boundary curve to parametrize");
  }
  const Vec2 g = profile_.curve()->point(s);
  const double r = std::sqrt(g[1]);
  return {r * std::cos(theta), r * std::sin(theta), g[0]};
}

std::pair<Vec3, Vec3> TorusDomain::boundary_tangents(double s, double theta) const {
  if (!profile_.has_curve()) {
    throw ValidationError("torus domain has no boundary curve to parametrize");
  }
  const Vec2 g = profile_.curve()->point(s);
  const Vec2 dg = profile_.curve()->tangent(s);
  const double r = std::sqrt(g[1]);
  const double dr = dg[1] / (2.0 * r);
  return {Vec3(dr * std::cos(theta), dr * std::sin(theta), dg[0]),
          Vec3(-r * std::sin(theta), r * std::cos(theta), 0.0)};
}

Box<3> TorusDomain::box() const {
  const Box<2>& e = profile_.extent();
  const double r = 1.1 * std::sqrt(e.hi[1]);
  const double pad = 0.1 * (e.hi[0] - e.lo[0]);
  return {Vec3(-r, -r, e.lo[0] - pad), Vec3(r, r, e.hi[0] + pad)};
}

double TorusDomain::diameter() const {
  const Box<2>& e = profile_.extent();
  const double r = std::sqrt(e.hi[1]);
  return std::hypot(2.0 * r, e.hi[0] - e.lo[0]);
}

// ---------------------------------------------------------------------------
// Implicit domains

std::string ImplicitDomain::description() const {
  std::vector<std::string> parts;
  for (const auto& [k, v] : params) parts.push_back(fmt::format("{}={}", k, v));
  return fmt::format("{}({})", kind, fmt::join(parts, ", "));
}

ImplicitDomain koranyi_ball(const HPoint& center, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("Koranyi ball radius must be positive");
  const Vec3 c = center.to_vec3();
  const double x0 = c[0], y0 = c[1], t0 = c[2];
  const double r4 = r * r * r * r;
  // q = center . xi^-1 = (x0 - x, y0 - y, t0 - t + 2(x0 y - x y0)); psi = |q_z|^4 + q_t^2 - r^4.
  auto value = [=](const Vec3& p) {
    const double dx = p[0] - x0, dy = p[1] - y0;
    const double R = dx * dx + dy * dy;
    const double qt = t0 - p[2] + 2.0 * (x0 * p[1] - p[0] * y0);
    return R * R + qt * qt - r4;
  };
  auto gradient = [=](const Vec3& p) {
    const double dx = p[0] - x0, dy = p[1] - y0;
    const double R = dx * dx + dy * dy;
    const double qt = t0 - p[2] + 2.0 * (x0 * p[1] - p[0] * y0);
    return Vec3(4.0 * R * dx - 4.0 * qt * y0, 4.0 * R * dy + 4.0 * qt * x0, -2.0 * qt);
  };
  auto hessian = [=](const Vec3& p) {
    const double dx = p[0] - x0, dy = p[1] - y0;
    const double R = dx * dx + dy * dy;
    Mat3 H;
    H(0, 0) = 4.0 * R + 8.0 * dx * dx + 8.0 * y0 * y0;
    H(1, 1) = 4.0 * R + 8.0 * dy * dy + 8.0 * x0 * x0;
    H(2, 2) = 2.0;
    H(0, 1) = H(1, 0) = 8.0 * dx * dy - 8.0 * x0 * y0;
    H(0, 2) = H(2, 0) = 4.0 * y0;
    H(1, 2) = H(2, 1) = -4.0 * x0;
    return H;
  };
  const double zr = std::hypot(x0, y0);
  const double tr = r * r + 2.0 * zr * r;
  Box<3> box = Box<3>{Vec3(x0 - r, y0 - r, t0 - tr), Vec3(x0 + r, y0 + r, t0 + tr)}.expanded(1.1);
  return {"koranyi-ball", {{"x0", x0}, {"y0", y0}, {"t0", t0}, {"r", r}},
          AmbientField(value, box, gradient, hessian), box, {}};
}

ImplicitDomain euclidean_ball(const Vec3& center, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ball radius must be positive");
  Box<3> box = Box<3>{center - Vec3::Constant(r), center + Vec3::Constant(r)}.expanded(1.1);
  AmbientField psi([center, r](const Vec3& p) { return (p - center).squaredNorm() - r * r; }, box,
                   [center](const Vec3& p) { return Vec3(2.0 * (p - center)); },
                   [](const Vec3&) { return Mat3(2.0 * Mat3::Identity()); });
  return {"euclidean-ball", {{"cx", center[0]}, {"cy", center[1]}, {"ct", center[2]}, {"r", r}},
          std::move(psi), box, {}};
}

ImplicitDomain half_space(double level, const Box<3>& box) {
  AmbientField psi([level](const Vec3& p) { return p[2] - level; }, box,
                   [](const Vec3&) { return Vec3(0.0, 0.0, 1.0); },
                   [](const Vec3&) { return Mat3(Mat3::Zero()); });
  return {"half-space", {{"level", level}}, std::move(psi), box, {}};
}

ImplicitDomain rescaled_defining(const ImplicitDomain& d, const AmbientField& h, const std::string& tag) {
  ImplicitDomain out = d;
  out.psi = scale_by(h, d.psi).with_box(d.box);
  out.kind = d.kind + "*" + tag;
  return out;
}

ImplicitDomain as_implicit(const TorusDomain& d) {
  return {"torus/" + d.profile().kind(), d.profile().params(), d.psi(), d.box(), {}};
}

// ---------------------------------------------------------------------------
// Meshing

BoundaryMesh boundary_mesh(const TorusDomain& domain, int n_s, int n_theta, Exec exec) {
  if (n_s < 1 || n_theta < 1) throw ValidationError("mesh dimensions must be positive");
  if (!domain.has_parametrization()) {
    throw ValidationError("parametric mesh requested for a profile without boundary curve");
  }
  BoundaryMesh mesh;
  mesh.kind = BoundaryMesh::Kind::Parametric;
  mesh.n_s = n_s;
  mesh.n_theta = n_theta;
  mesh.box = domain.box();
  std::vector<Vec3> pts(static_cast<std::size_t>(n_s) * n_theta);
  for (int i = 0; i < n_s; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      pts[static_cast<std::size_t>(i) * n_theta + j] =
          domain.boundary_point(static_cast<double>(i) / n_s, kTwoPi * j / n_theta);
    }
  }
  const auto grads = exec == Exec::Parallel ? kernels::evaluate_samples(domain.psi(), pts)
                                            : kernels::evaluate_samples_serial(domain.psi(), pts);
  mesh.samples.resize(pts.size());
  double max_grad = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    MeshSample& m = mesh.samples[k];
    m.xi = pts[k];
    m.grad = grads[k];
    m.s = static_cast<double>(k / n_theta) / n_s;
    m.theta = kTwoPi * static_cast<double>(k % n_theta) / n_theta;
    max_grad = std::max(max_grad, grads[k].euclidean.norm());
  }
  mesh.scale = std::max(max_grad, 1e-300) * domain.diameter();
  return mesh;
}

BoundaryMesh boundary_mesh(const ImplicitDomain& domain, int grid, Exec exec) {
  if (grid < 2) throw ValidationError("box grid needs at least two cells per axis");
  const bool par = exec == Exec::Parallel;
  kernels::Lattice lattice{domain.box, grid};
  const auto values = par ? kernels::lattice_values(domain.psi, lattice)
                          : kernels::lattice_values_serial(domain.psi, lattice);
  const auto cells = par ? kernels::crossing_cells(values, lattice)
                         : kernels::crossing_cells_serial(values, lattice);
  if (cells.empty()) {
    throw ValidationError(fmt::format("no sign change of the defining field inside the box of {}",
                                      domain.description()));
  }
  const Vec3 h = lattice.spacing();
  std::vector<Vec3> seeds;
  seeds.reserve(cells.size());
  for (const auto& c : cells) seeds.push_back(lattice.node(c[0], c[1], c[2]) + 0.5 * h);

  const auto seed_grads = par ? kernels::evaluate_samples(domain.psi, seeds)
                              : kernels::evaluate_samples_serial(domain.psi, seeds);
  double max_grad = 0.0;
  for (const auto& g : seed_grads) max_grad = std::max(max_grad, g.euclidean.norm());
  const double provisional_scale = std::max(max_grad, 1e-300) * domain.diameter();
  const double tol = 1e-10 * provisional_scale;

  const auto proj = par ? kernels::project_to_zero_set(domain.psi, seeds, tol)
                        : kernels::project_to_zero_set_serial(domain.psi, seeds, tol);
  BoundaryMesh mesh;
  mesh.kind = BoundaryMesh::Kind::BoxGrid;
  mesh.grid = grid;
  mesh.box = domain.box;
  std::vector<Vec3> pts;
  std::vector<std::array<int, 3>> kept_cells;
  for (std::size_t k = 0; k < proj.size(); ++k) {
    const Vec3 moved = (proj[k].point - seeds[k]).cwiseAbs();
    if (!proj[k].converged || (moved.array() > 2.0 * h.array()).any() ||
        !domain.box.contains(proj[k].point)) {
      ++mesh.dropped;
      continue;
    }
    pts.push_back(proj[k].point);
    kept_cells.push_back(cells[k]);
  }
  if (pts.empty()) throw NumericalError("no boundary seed converged onto the zero set");
  const auto grads = par ? kernels::evaluate_samples(domain.psi, pts)
                         : kernels::evaluate_samples_serial(domain.psi, pts);
  mesh.samples.resize(pts.size());
  max_grad = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    mesh.samples[k].xi = pts[k];
    mesh.samples[k].grad = grads[k];
    mesh.samples[k].cell = kept_cells[k];
    max_grad = std::max(max_grad, grads[k].euclidean.norm());
  }
  mesh.scale = std::max(max_grad, 1e-300) * domain.diameter();
  return mesh;
}

}  // namespace heischar
