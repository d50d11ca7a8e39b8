#include "heischar/cli.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <omp.h>

#include <ctime>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "heischar/convex_geometry.hpp"
#include "heischar/kernels.hpp"
#include "heischar/profiles.hpp"
#include "heischar/report.hpp"
#include "heischar/torus_map.hpp"

namespace heischar::cli {
namespace {

using report::Json;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::vector<double> center_or(const DomainSpec& d, std::vector<double> fallback, std::size_t size) {
  const std::vector<double>& c = d.center.empty() ? fallback : d.center;
  if (c.size() != size) throw ValidationError(fmt::format("--center needs {} comma-separated values", size));
  return c;
}

std::vector<Vec2> parse_vertices(const std::string& text) {
  std::vector<Vec2> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    double a = 0.0, b = 0.0;
    char comma = 0;
    std::istringstream is(item);
    if (!(is >> a >> comma >> b) || comma != ',') {
      throw ValidationError(fmt::format("--vertices expects 'x,y;x,y;...', got '{}'", item));
    }
    out.emplace_back(a, b);
  }
  return out;
}

Profile build_profile(const DomainSpec& d) {
  if (d.profile == "disc") {
    const auto c = center_or(d, {1.0, 2.0}, 2);
    return disc_profile(c[0], c[1], d.radius);
  }
  if (d.profile == "ellipse") {
    const auto c = center_or(d, {0.0, 3.0}, 2);
    if (d.axes.size() != 2) throw ValidationError("--axes needs two values");
    return ellipse_profile(c[0], c[1], d.axes[0], d.axes[1]);
  }
  if (d.profile == "polygon") return rounded_polygon_profile(parse_vertices(d.vertices), d.rounding);
  if (d.profile == "crescent") {
    const auto c = center_or(d, {1.0, 3.0}, 2);
    if (d.crescent.size() != 3) throw ValidationError("--crescent needs R,d,r");
    return crescent_profile(c[0], c[1], d.crescent[0], d.crescent[1], d.crescent[2]);
  }
  if (d.profile == "half-disc") return half_disc_profile();
  if (d.profile == "file") {
    if (d.profile_file.empty()) throw ValidationError("--profile file needs --profile-file PATH");
    return load_profile_spec(d.profile_file);
  }
  throw ValidationError(fmt::format("unknown profile '{}'", d.profile));
}

Json profile_json(const Profile& p) {
  Json j = {{"kind", p.kind()}, {"description", p.description()}, {"params", Json::object()}};
  for (const auto& [k, v] : p.params()) j["params"][k] = v;
  j["y_min"] = p.y_min();
  return j;
}

FdPolicy fd_policy(const RunConfig& c, FdPolicy base) {
  if (c.fd_gradient_step) base.gradient_step = *c.fd_gradient_step;
  if (c.fd_hessian_step) base.hessian_step = *c.fd_hessian_step;
  return base;
}

ImplicitDomain build_implicit(const RunConfig& c) {
  const DomainSpec& d = c.domain;
  ImplicitDomain dom = [&] {
    if (d.name == "koranyi-ball") {
      const auto ctr = center_or(d, {0.0, 0.0, 0.0}, 3);
      return koranyi_ball(HPoint(ctr[0], ctr[1], ctr[2]), d.radius);
    }
    if (d.name == "sphere") {
      const auto ctr = center_or(d, {0.0, 0.0, 5.0}, 3);
      return euclidean_ball(Vec3(ctr[0], ctr[1], ctr[2]), d.radius);
    }
    if (d.name == "half-space") {
      if (d.box.size() != 6) throw ValidationError("--box needs xlo,xhi,ylo,yhi,tlo,thi");
      return half_space(d.level, Box<3>{Vec3(d.box[0], d.box[2], d.box[4]), Vec3(d.box[1], d.box[3], d.box[5])});
    }
    throw ValidationError(fmt::format("unknown domain '{}'", d.name));
  }();
  dom.psi = dom.psi.with_fd_policy(fd_policy(c, dom.psi.fd_policy()));
  return dom;
}

Json config_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  const FdPolicy fd = fd_policy(c, FdPolicy{});
  j["fd"] = {{"gradient_step", fd.gradient_step}, {"hessian_step", fd.hessian_step}, {"richardson", fd.richardson}};
  return j;
}

void stamp_run(Json& j) {
  Json& run = j["run"];
  run["timestamp"] = utc_timestamp();
  run["threads"] = omp_get_max_threads();
}

void emit_json(const Json& j, const RunConfig& c, std::ostream& out) {
  if (c.out) {
    report::write_text(*c.out, j.dump(2) + "\n");
  } else {
    out << j.dump(2) << "\n";
  }
}

int run_scan(const RunConfig& c, std::ostream& out) {
  const DomainSpec& d = c.domain;
  CharacteristicReport rep;
  if (d.name == "torus") {
    const TorusDomain torus = TorusDomain::make(build_profile(d));
    if (torus.has_parametrization()) {
      rep = scan(torus, c.scan);
    } else {
      if (c.svg) throw ValidationError("heatmap needs a parametric torus; this profile has no boundary curve");
      ImplicitDomain dom = as_implicit(torus);
      dom.psi = dom.psi.with_fd_policy(fd_policy(c, dom.psi.fd_policy()));
      rep = scan(dom, c.scan);
    }
  } else {
    if (c.svg) throw ValidationError("heatmap needs a parametric (torus) scan; box-grid scans have no (s, theta)");
    rep = scan(build_implicit(c), c.scan);
  }
  Json full = report::to_json(rep, {.include_samples = true, .include_heatmap = true});
  if (c.csv) report::write_text(*c.csv, report::csv_from_json(full));
  if (c.svg) report::write_text(*c.svg, report::svg_heatmap_from_json(full));
  if (!c.samples_in_json) full.erase("samples");
  Json j;
  j["command"] = "scan";
  j["config"] = config_json(c);
  for (auto& [k, v] : full.items()) j[k] = v;
  stamp_run(j);
  emit_json(j, c, out);
  if (c.out) out << "scan: " << rep.finding() << fmt::format("; global min m = {:.6g}\n", rep.global_min_m);
  return 0;
}

ConvexProfile build_convex(const RunConfig& c) {
  std::optional<Vec2> A;
  if (!c.A.empty()) {
    if (c.A.size() != 2) throw ValidationError("--A needs two values");
    A = Vec2(c.A[0], c.A[1]);
  }
  return ConvexProfile::make(build_profile(c.domain), A, c.r);
}

int run_certify(const RunConfig& c, std::ostream& out) {
  const Profile profile = build_profile(c.domain);
  if (profile.kind() == "disc") {
    const auto& p = profile.params();
    disc_certificate(p.at("a1"), p.at("a2"), p.at("r"));
  }
  const ConvexProfile cp = build_convex(c);
  const ConvexCertificate cert = certify_convex(cp, c.samples, c.scan.tol_char);
  Json j;
  j["schema_version"] = report::kSchemaVersion;
  j["command"] = "certify";
  j["config"] = config_json(c);
  j["profile"] = profile_json(cp.base());
  j["convex"] = {{"A", vec(cp.A())},
                 {"r", cp.r()},
                 {"boundary_distance", cp.boundary_distance()},
                 {"min_turn", cp.convexity().min_turn},
                 {"max_turn", cp.convexity().max_turn}};
  j["certificate"] = report::to_json(cert, c.samples_in_json);
  stamp_run(j);
  emit_json(j, c, out);
  if (c.out) out << "certify: " << (cert.pass ? "PASS" : "FAIL") << fmt::format(" ({} samples)\n", cert.n_samples);
  return cert.pass ? 0 : 2;
}

int run_map(const RunConfig& c, std::ostream& out) {
  if (c.point.size() != 3) throw ValidationError("map needs --point x,y,t");
  const HPoint p(c.point[0], c.point[1], c.point[2]);
  const ProductPoint q = F(p);
  const HPoint back = F_inv(q);
  Json j;
  j["schema_version"] = report::kSchemaVersion;
  j["command"] = "map";
  j["point"] = vec(p.to_vec3());
  j["F"] = {{"w", vec(q.w)}, {"u", vec(q.u)}};
  j["round_trip_error"] = (back.to_vec3() - p.to_vec3()).norm();
  j["singular_values"] = vec(TF_singular_values(p));
  if (!c.vector.empty()) {
    if (c.vector.size() != 3) throw ValidationError("--vector needs vx,vy,vt");
    const ProductTangent t = TF(p, TangentVector(p, Vec3(c.vector[0], c.vector[1], c.vector[2])));
    j["TF"] = {{"dw", vec(t.dw)}, {"du", vec(t.du)}};
  }
  stamp_run(j);
  emit_json(j, c, out);
  return 0;
}

int run_profile_map(const RunConfig& c, std::ostream& out) {
  const ConvexProfile cp = build_convex(c);
  const InjectivityCheck inj = g_injectivity(cp);
  const double lip = radial_lipschitz(cp);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double err_hg = 0.0, err_gh = 0.0;
  for (int k = 0; k < c.samples; ++k) {
    const double rad = cp.r() * std::sqrt(unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    const Vec2 Y = cp.A() + rad * Vec2(std::cos(ang), std::sin(ang));
    err_hg = std::max(err_hg, (cp.H_map(cp.G_map(Y)) - Y).norm());
  }
  const Box<2>& ext = cp.base().extent();
  for (int k = 0; k < c.samples;) {
    const Vec2 X = ext.lo + Vec2(unit(rng), unit(rng)).cwiseProduct(ext.extent());
    if (!(cp.base().implicit().value(X) < 0.0)) continue;
    err_gh = std::max(err_gh, (cp.G_map(cp.H_map(X)) - X).norm());
    ++k;
  }
  Json j;
  j["schema_version"] = report::kSchemaVersion;
  j["command"] = "profile-map";
  j["config"] = config_json(c);
  j["profile"] = profile_json(cp.base());
  j["A"] = vec(cp.A());
  j["r"] = cp.r();
  j["r_default"] = !c.r.has_value();
  j["boundary_distance"] = cp.boundary_distance();
  j["convexity"] = {{"samples", cp.convexity().samples},
                    {"min_turn", cp.convexity().min_turn},
                    {"max_turn", cp.convexity().max_turn}};
  j["injectivity"] = {{"ok", inj.ok},
                      {"samples", inj.samples},
                      {"min_separation", inj.min_separation},
                      {"separation_ratio", inj.separation_ratio}};
  j["radial_lipschitz"] = lip;
  j["round_trip"] = {{"samples", c.samples}, {"max_error_H_of_G", err_hg}, {"max_error_G_of_H", err_gh}};
  if (!c.point.empty()) {
    if (c.point.size() != 2) throw ValidationError("profile-map --point needs a,b");
    const Vec2 X(c.point[0], c.point[1]);
    Json pj = {{"point", vec(X)}};
    if (cp.base().implicit().value(X) <= cp.boundary_tol()) pj["H"] = vec(cp.H_map(X));
    if ((X - cp.A()).norm() <= cp.r()) pj["G"] = vec(cp.G_map(X));
    j["point"] = pj;
  }
  if (c.svg) report::write_text(*c.svg, report::svg_profile_sketch(cp));
  stamp_run(j);
  emit_json(j, c, out);
  return 0;
}

int run_report(const RunConfig& c, std::ostream& out) {
  if (!c.input) throw ValidationError("report needs --in REPORT.json");
  const Json j = report::read_json(*c.input);
  if (!c.csv && !c.svg) throw ValidationError("report needs --csv and/or --svg");
  if (c.csv) report::write_text(*c.csv, report::csv_from_json(j));
  if (c.svg) report::write_text(*c.svg, report::svg_heatmap_from_json(j));
  out << "report: rendered " << c.input->string() << "\n";
  return 0;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--out", c.out, "JSON output path (stdout when omitted)");
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--tol-char", c.scan.tol_char, "Characteristic threshold on m")->capture_default_str();
}

void add_profile_options(CLI::App* sub, RunConfig& c) {
  DomainSpec& d = c.domain;
  sub->add_option("--profile", d.profile, "disc | ellipse | polygon | crescent | half-disc | file")
      ->capture_default_str();
  sub->add_option("--profile-file", d.profile_file, "Profile definition file");
  sub->add_option("--center", d.center, "Centre (comma separated)")->delimiter(',');
  sub->add_option("--radius", d.radius, "Radius")->capture_default_str();
  sub->add_option("--axes", d.axes, "Ellipse semi-axes r1,r2")->delimiter(',');
  sub->add_option("--vertices", d.vertices, "Polygon vertices x,y;x,y;...")->capture_default_str();
  sub->add_option("--rounding", d.rounding, "Polygon corner radius")->capture_default_str();
  sub->add_option("--crescent", d.crescent, "Crescent R,d,r")->delimiter(',');
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::Scan: return "scan";
    case Command::Certify: return "certify";
    case Command::Map: return "map";
    case Command::ProfileMap: return "profile-map";
    case Command::Report: return "report";
  }
  return "scan";
}

void RunConfig::validate() const {
  if (command == Command::Scan) {
    if (domain.name == "torus") {
      if (scan.n_s < 8 || scan.n_theta < 8) throw ValidationError("mesh dimensions must be at least 8");
    } else if (scan.grid < 8) {
      throw ValidationError("box grid must be at least 8");
    }
  }
  if (!(scan.tol_char > 0.0) || !(scan.tol_suspect > scan.tol_char)) {
    throw ValidationError("tolerances must satisfy 0 < tol_char < tol_suspect");
  }
  if (scan.dedupe_radius && !(*scan.dedupe_radius > 0.0)) throw ValidationError("dedupe radius must be positive");
  if (scan.refine_iters < 0) throw ValidationError("refine iterations must be non-negative");
  if (samples < 1) throw ValidationError("sample count must be positive");
  if (fd_gradient_step && !(*fd_gradient_step > 0.0)) throw ValidationError("fd steps must be positive");
  if (fd_hessian_step && !(*fd_hessian_step > 0.0)) throw ValidationError("fd steps must be positive");
}

ParseOutcome parse_args(int argc, const char* const* argv) {
  RunConfig c;
  CLI::App app{"Characteristic points of domains in the Heisenberg group"};
  app.require_subcommand(1);

  auto* scan_cmd = app.add_subcommand("scan", "Search a domain boundary for characteristic points");
  add_common(scan_cmd, c);
  add_profile_options(scan_cmd, c);
  scan_cmd->add_option("--domain", c.domain.name, "koranyi-ball | torus | sphere | half-space")->capture_default_str();
  scan_cmd->add_option("--grid", c.scan.grid, "Box grid cells per axis")->capture_default_str();
  scan_cmd->add_option("--ns", c.scan.n_s, "Torus mesh size in s")->capture_default_str();
  scan_cmd->add_option("--ntheta", c.scan.n_theta, "Torus mesh size in theta")->capture_default_str();
  scan_cmd->add_option("--tol-suspect", c.scan.tol_suspect, "Upper end of the suspect band")->capture_default_str();
  scan_cmd->add_option("--dedupe-radius", c.scan.dedupe_radius, "Koranyi radius for merging minima");
  scan_cmd->add_option("--refine-iters", c.scan.refine_iters, "Refinement iteration cap")->capture_default_str();
  scan_cmd->add_option("--fd-gradient-step", c.fd_gradient_step, "Relative finite-difference gradient step");
  scan_cmd->add_option("--fd-hessian-step", c.fd_hessian_step, "Relative finite-difference Hessian step");
  scan_cmd->add_option("--level", c.domain.level, "Half-space level")->capture_default_str();
  scan_cmd->add_option("--box", c.domain.box, "Half-space search box xlo,xhi,ylo,yhi,tlo,thi")->delimiter(',');
  scan_cmd->add_flag("--validate-full", c.scan.validate_full_refinement, "Also refine torus minima over (s, theta)");
  scan_cmd->add_flag("--samples-in-json", c.samples_in_json, "Embed per-sample rows in the JSON report");
  scan_cmd->add_option("--csv", c.csv, "Per-sample CSV output");
  scan_cmd->add_option("--svg", c.svg, "Heatmap SVG output (torus scans)");
  bool serial = false;
  scan_cmd->add_flag("--serial", serial, "Use the serial reference kernels");

  auto* cert_cmd = app.add_subcommand("certify", "Non-characteristic certificate for a convex profile torus");
  add_common(cert_cmd, c);
  add_profile_options(cert_cmd, c);
  cert_cmd->add_option("--samples", c.samples, "Boundary samples")->capture_default_str();
  cert_cmd->add_option("--A", c.A, "Disc centre a,b")->delimiter(',');
  cert_cmd->add_option("--r", c.r, "Disc radius");
  cert_cmd->add_flag("--samples-in-json", c.samples_in_json, "Embed per-sample results");

  auto* map_cmd = app.add_subcommand("map", "Evaluate F, its inverse and its tangent map");
  map_cmd->add_option("--out", c.out, "JSON output path (stdout when omitted)");
  map_cmd->add_option("--point", c.point, "x,y,t")->delimiter(',')->required();
  map_cmd->add_option("--vector", c.vector, "vx,vy,vt")->delimiter(',');

  auto* pm_cmd = app.add_subcommand("profile-map", "Disc homeomorphism of a convex profile");
  add_common(pm_cmd, c);
  add_profile_options(pm_cmd, c);
  int pm_samples = 1000;
  pm_cmd->add_option("--samples", pm_samples, "Random round-trip points")->capture_default_str();
  pm_cmd->add_option("--A", c.A, "Disc centre a,b")->delimiter(',');
  pm_cmd->add_option("--r", c.r, "Disc radius");
  pm_cmd->add_option("--point", c.point, "a,b")->delimiter(',');
  pm_cmd->add_option("--svg", c.svg, "Profile sketch SVG output");

  auto* rep_cmd = app.add_subcommand("report", "Render CSV or SVG from a JSON report");
  rep_cmd->add_option("--in", c.input, "Scan report JSON")->required();
  rep_cmd->add_option("--csv", c.csv, "CSV output");
  rep_cmd->add_option("--svg", c.svg, "Heatmap SVG output");

  ParseOutcome outcome;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os, es;
    const int code = app.exit(e, os, es);
    outcome.exit_code = code == 0 ? 0 : 1;
    outcome.message = os.str() + es.str();
    return outcome;
  }
  if (scan_cmd->parsed()) {
    c.command = Command::Scan;
    c.scan.exec = serial ? Exec::Serial : Exec::Parallel;
  } else if (cert_cmd->parsed()) {
    c.command = Command::Certify;
  } else if (map_cmd->parsed()) {
    c.command = Command::Map;
  } else if (pm_cmd->parsed()) {
    c.command = Command::ProfileMap;
    c.samples = pm_samples;
  } else {
    c.command = Command::Report;
  }
  outcome.config = c;
  return outcome;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    kernels::configure_threads();
    switch (config.command) {
      case Command::Scan: return run_scan(config, out);
      case Command::Certify: return run_certify(config, out);
      case Command::Map: return run_map(config, out);
      case Command::ProfileMap: return run_profile_map(config, out);
      case Command::Report: return run_report(config, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed report: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int main(int argc, const char* const* argv) {
  const ParseOutcome parsed = parse_args(argc, argv);
  if (!parsed.config) {
    (parsed.exit_code == 0 ? std::cout : std::cerr) << parsed.message;
    return parsed.exit_code;
  }
  return run(*parsed.config, std::cout, std::cerr);
}

}  // namespace heischar::cli
