#include "heischar/report.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "heischar/torus_map.hpp"

namespace heischar::report {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Json vec(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json point_json(const CharPoint& c) {
  Json j;
  j["xi"] = vec(c.xi);
  j["m"] = c.m;
  j["converged"] = c.converged;
  j["polished"] = c.polished;
  j["iterations"] = c.iterations;
  if (c.s) j["s"] = *c.s;
  if (c.theta) j["theta"] = *c.theta;
  return j;
}

double as_double(const Json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

std::string num(double v) { return fmt::format("{:.6g}", v); }

// Piecewise-linear ramp from dark blue through teal to yellow.
std::string ramp(double u) {
  static const double stops[][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(u));
  const double f = u - k;
  int c[3];
  for (int i = 0; i < 3; ++i) c[i] = static_cast<int>(std::lround(stops[k][i] + f * (stops[k + 1][i] - stops[k][i])));
  return fmt::format("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
}

}  // namespace

Json to_json(const ConvexCertificate& cert, bool include_samples) {
  Json j;
  j["verdict"] = cert.pass ? "PASS" : "FAIL";
  j["samples"] = cert.n_samples;
  j["tol_char"] = cert.tol_char;
  j["rank_tol"] = cert.rank_tol;
  j["intersection_dim_one"] = cert.dim_one;
  j["cases"] = Json::object();
  for (const auto& [k, v] : cert.case_counts) j["cases"][k] = v;
  j["min_conditioning"] = cert.min_conditioning;
  j["min_hgrad"] = cert.min_hgrad;
  if (cert.analytic) {
    j["analytic"] = {{"min_hgrad_sq", cert.analytic->min_hgrad_sq}, {"min_hgrad", cert.analytic->min_hgrad}};
  }
  j["violations"] = Json::array();
  for (std::size_t k : cert.violations) {
    const auto& s = cert.samples[k];
    j["violations"].push_back({{"index", k}, {"s", s.s}, {"theta", s.theta}, {"xi", vec(s.xi)},
                               {"conditioning", s.conditioning}});
  }
  if (include_samples) {
    j["per_sample"] = Json::array();
    for (const auto& s : cert.samples) {
      j["per_sample"].push_back({{"s", s.s},
                                 {"theta", s.theta},
                                 {"xi", vec(s.xi)},
                                 {"intersection_dim", s.intersection_dim},
                                 {"conditioning", s.conditioning},
                                 {"case", to_string(s.tangency)},
                                 {"hgrad", s.hgrad}});
    }
  }
  return j;
}

Json to_json(const CharacteristicReport& rep, const JsonOptions& opts) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["domain"] = {{"kind", rep.domain_kind}, {"description", rep.domain_description}, {"params", Json::object()}};
  for (const auto& [k, v] : rep.domain_params) j["domain"]["params"][k] = v;

  Json mesh;
  mesh["kind"] = rep.parametric ? "parametric" : "box-grid";
  if (rep.parametric) {
    mesh["n_s"] = rep.n_s;
    mesh["n_theta"] = rep.n_theta;
  } else {
    mesh["grid"] = rep.grid;
    mesh["dropped"] = rep.dropped;
  }
  mesh["samples"] = rep.samples.size();
  mesh["scale"] = rep.scale;
  mesh["diameter"] = rep.diameter;
  j["mesh"] = mesh;

  j["tolerances"] = {{"tol_char", rep.tol_char},       {"tol_suspect", rep.tol_suspect},
                     {"dedupe_radius", rep.dedupe_radius}, {"refine_iters", rep.refine_iters},
                     {"newton_tol", rep.newton_tol},   {"degenerate_tol", rep.degenerate_tol},
                     {"rank_tol", rep.rank_tol},       {"tol_center", kTolCenter}};
  j["conventions"] = {{"measure", "|grad_H psi| / (|grad psi| (1 + 2|z|))"},
                      {"distance", "rho(p . q^-1)"},
                      {"tangency_pushforward", "(v_t, 2(x v_x + y v_y)); factor 2 from d|z|^2"}};

  Json gm = {{"value", rep.global_min_m}, {"xi", vec(rep.global_min_xi)}};
  if (rep.global_min_s) gm["s"] = *rep.global_min_s;
  j["global_min_m"] = gm;
  j["min_hgrad"] = {{"value", rep.min_hgrad}, {"xi", vec(rep.min_hgrad_xi)}};
  if (rep.theta_variation) j["theta_variation"] = *rep.theta_variation;
  if (rep.full_refinement_discrepancy) j["full_refinement_discrepancy"] = *rep.full_refinement_discrepancy;
  j["minima_refined"] = rep.minima_refined;
  j["characteristic"] = Json::array();
  for (const auto& c : rep.characteristic) j["characteristic"].push_back(point_json(c));
  j["suspect"] = Json::array();
  for (const auto& c : rep.suspect) j["suspect"].push_back(point_json(c));
  j["defining_violations"] = rep.defining_violations;
  j["finding"] = rep.finding();
  if (rep.certificate) j["certificate"] = to_json(*rep.certificate);

  if (rep.parametric && opts.include_heatmap) {
    Json m = Json::array();
    for (const auto& s : rep.samples) m.push_back(number_or_null(s.m));
    j["heatmap"] = {{"n_s", rep.n_s}, {"n_theta", rep.n_theta}, {"m", std::move(m)}};
  }
  if (opts.include_samples) {
    Json samples = Json::array();
    for (const auto& s : rep.samples) {
      Json row;
      if (s.s) row["s"] = *s.s;
      if (s.theta) row["theta"] = *s.theta;
      row["xi"] = vec(s.xi);
      row["psi"] = s.grad.value;
      row["grad"] = s.grad.euclidean_norm();
      row["hgrad"] = s.grad.horizontal ? s.grad.horizontal->norm() : 0.0;
      row["m"] = number_or_null(s.m);
      samples.push_back(std::move(row));
    }
    j["samples"] = std::move(samples);
  }

  Json run;
  run["timings"] = Json::object();
  for (const auto& [k, v] : rep.timings) run["timings"][k] = v;
  j["run"] = run;
  return j;
}

Json without_run_info(Json j) {
  j.erase("run");
  return j;
}

std::string csv_from_json(const Json& j) {
  if (!j.contains("samples")) throw ValidationError("report has no per-sample data (rerun scan with --samples-in-json)");
  std::string out = "s,theta,x,y,t,psi,grad,hgrad,m\n";
  for (const auto& row : j["samples"]) {
    const auto& xi = row["xi"];
    auto opt = [&](const char* key) { return row.contains(key) ? fmt::format("{:.17g}", row[key].get<double>()) : std::string(); };
    out += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", opt("s"), opt("theta"),
                       xi[0].get<double>(), xi[1].get<double>(), xi[2].get<double>(), row["psi"].get<double>(),
                       row["grad"].get<double>(), row["hgrad"].get<double>(),
                       row["m"].is_null() ? std::string("nan") : fmt::format("{:.17g}", row["m"].get<double>()));
  }
  return out;
}

std::string svg_heatmap_from_json(const Json& j) {
  if (!j.contains("heatmap")) throw ValidationError("heatmap needs a parametric (torus) scan report");
  const auto& h = j["heatmap"];
  const int ns = h["n_s"].get<int>();
  const int nt = h["n_theta"].get<int>();
  const auto& m = h["m"];
  if (static_cast<int>(m.size()) != ns * nt) throw ValidationError("heatmap size does not match its dimensions");
  const double tol_char = j["tolerances"]["tol_char"].get<double>();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : m) {
    const double x = as_double(v);
    if (std::isnan(x)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!(hi >= lo)) lo = hi = 0.0;
  const double span = hi > lo ? hi - lo : 1.0;

  constexpr int cell = 4;
  constexpr int margin = 40;
  const int width = nt * cell, height = ns * cell;
  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      width + 2 * margin + 60, height + 2 * margin, width + 2 * margin + 60, height + 2 * margin);
  svg << "<style>.zero{stroke:#ff0000;stroke-width:0.5}.min{fill:none;stroke:#ffffff;stroke-width:1.5}"
         "text{font-family:monospace;font-size:10px}</style>\n";
  svg << fmt::format("<text x=\"{}\" y=\"14\">m over (s, theta): {}</text>\n", margin,
                     j["domain"]["description"].get<std::string>());
  svg << fmt::format("<g transform=\"translate({},{})\">\n", margin, margin);
  for (int i = 0; i < ns; ++i) {
    for (int k = 0; k < nt; ++k) {
      const double v = as_double(m[static_cast<std::size_t>(i) * nt + k]);
      const bool zero = !std::isnan(v) && v < tol_char;
      const std::string fill = std::isnan(v) ? "#808080" : ramp((v - lo) / span);
      svg << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"{}/>\n", k * cell, i * cell,
                         cell, cell, fill, zero ? " class=\"zero\"" : "");
    }
  }
  auto mark = [&](const Json& p, const char* cls) {
    if (!p.contains("s")) return;
    const double s = p["s"].get<double>();
    const double th = p.contains("theta") ? p["theta"].get<double>() : 0.0;
    svg << fmt::format("<circle class=\"{}\" cx=\"{}\" cy=\"{}\" r=\"4\"/>\n", cls, num(th / kTwoPi * width),
                       num(s * height));
  };
  for (const auto& p : j["characteristic"]) mark(p, "min");
  for (const auto& p : j["suspect"]) mark(p, "min");
  mark(j["global_min_m"], "min");
  svg << "</g>\n";
  svg << fmt::format("<text x=\"{}\" y=\"{}\">theta 0 .. 2pi</text>\n", margin, height + margin + 16);
  svg << fmt::format("<text x=\"4\" y=\"{}\">s</text>\n", margin + height / 2);
  for (int b = 0; b <= 10; ++b) {
    const double u = 1.0 - b / 10.0;
    svg << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"{}\" fill=\"{}\"/>\n", width + margin + 12,
                       margin + b * height / 11, height / 11 + 1, ramp(u));
  }
  svg << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", width + margin + 28, margin + 8, num(hi));
  svg << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", width + margin + 28, margin + height, num(lo));
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_heatmap(const CharacteristicReport& rep) {
  if (!rep.parametric) throw ValidationError("heatmap needs a parametric (torus) scan report");
  return svg_heatmap_from_json(to_json(rep));
}

std::string svg_profile_sketch(const ConvexProfile& cp) {
  const auto& curve = *cp.base().curve();
  constexpr int n = 256;
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = curve.point(static_cast<double>(i) / n);
  Box<2> ext = cp.base().extent();
  ext.lo[1] = std::min(ext.lo[1], 0.0);
  ext = ext.expanded(1.2);
  constexpr double size = 400.0;
  const double scale = size / std::max(ext.extent()[0], ext.extent()[1]);
  auto px = [&](const Vec2& p) {
    return std::pair{num((p[0] - ext.lo[0]) * scale), num((ext.hi[1] - p[1]) * scale)};
  };
  const double w = ext.extent()[0] * scale, h = ext.extent()[1] * scale;
  std::ostringstream svg;
  svg << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
                     num(w), num(h), num(w), num(h));
  const auto [ax0, ay] = px(Vec2(ext.lo[0], 0.0));
  const auto [ax1, ay1] = px(Vec2(ext.hi[0], 0.0));
  svg << fmt::format("<line class=\"axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888888\"/>\n", ax0, ay,
                     ax1, ay1);
  svg << "<polygon class=\"boundary\" fill=\"#dde8f4\" stroke=\"#1f4e79\" points=\"";
  for (int i = 0; i < n; ++i) {
    const auto [x, y] = px(pts[i]);
    svg << (i ? " " : "") << x << "," << y;
  }
  svg << "\"/>\n";
  const auto [cx, cy] = px(cp.A());
  svg << fmt::format("<circle class=\"disc\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#c0392b\"/>\n", cx, cy,
                     num(cp.r() * scale));
  svg << fmt::format("<circle class=\"center\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#c0392b\"/>\n", cx, cy);
  svg << fmt::format("<text x=\"4\" y=\"14\" font-family=\"monospace\" font-size=\"10\">{}  A=({}, {})  r={}</text>\n",
                     cp.base().description(), num(cp.A()[0]), num(cp.A()[1]), num(cp.r()));
  svg << "</svg>\n";
  return svg.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw ValidationError(fmt::format("failed writing '{}'", path.string()));
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

}  // namespace heischar::report
