#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "heischar/cli.hpp"
#include "heischar/report.hpp"

using namespace heischar;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "heischar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  const cli::ParseOutcome p = cli::parse_args(static_cast<int>(argv.size()), argv.data());
  if (!p.config) return {p.exit_code, p.message, ""};
  std::ostringstream out, err;
  const int code = cli::run(*p.config, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("heischar_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ScanKoranyiBall) {
  const Result r = invoke({"scan", "--domain", "koranyi-ball", "--radius", "1", "--grid", "64", "--out", path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const report::Json j = report::read_json(path("r.json"));
  EXPECT_EQ(j["schema_version"], report::kSchemaVersion);
  EXPECT_EQ(j["characteristic"].size(), 2u);
  EXPECT_EQ(j["tolerances"]["tol_char"], 1e-6);
  EXPECT_EQ(j["tolerances"]["tol_suspect"], 1e-3);
  EXPECT_TRUE(j.contains("global_min_m"));
  EXPECT_FALSE(j.contains("samples"));
  EXPECT_NE(r.out.find("2 characteristic point(s)"), std::string::npos);
}

TEST_F(CliTest, CertifyExitCodes) {
  const Result ok = invoke({"certify", "--profile", "disc", "--center", "1,2", "--radius", "1", "--samples", "10000",
                            "--out", path("c.json")});
  EXPECT_EQ(ok.code, 0) << ok.err;
  const report::Json j = report::read_json(path("c.json"));
  EXPECT_EQ(j["certificate"]["verdict"], "PASS");
  EXPECT_EQ(j["certificate"]["intersection_dim_one"], 10000);

  const Result bad = invoke({"certify", "--profile", "disc", "--center", "1,0.5", "--radius", "1"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("error"), std::string::npos);

  const Result crescent = invoke({"certify", "--profile", "crescent", "--center", "0,3"});
  EXPECT_EQ(crescent.code, 1);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({"scan", "--grid", "4"}).code, 1);
  EXPECT_EQ(invoke({"scan", "--tol-char", "1e-3", "--tol-suspect", "1e-4"}).code, 1);
  EXPECT_EQ(invoke({"scan", "--domain", "dodecahedron"}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"map"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"map", "--point", "0,0,1"}).code, 1);
  EXPECT_EQ(invoke({"scan", "--domain", "torus", "--profile", "half-disc"}).code, 1);
}

TEST_F(CliTest, MapOutputs) {
  const Result r = invoke({"map", "--point", "1,0,4", "--vector", "0,1,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const report::Json j = report::Json::parse(r.out);
  EXPECT_EQ(j["F"]["w"], report::Json::array({4.0, 1.0}));
  EXPECT_EQ(j["F"]["u"], report::Json::array({1.0, 0.0}));
  EXPECT_EQ(j["TF"]["du"], report::Json::array({0.0, 1.0}));
  EXPECT_EQ(j["round_trip_error"], 0.0);
}

TEST_F(CliTest, ProfileMapRoundTrips) {
  const Result r = invoke({"profile-map", "--profile", "ellipse", "--center", "0,3", "--axes", "2,1", "--samples",
                           "200", "--svg", path("k.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const report::Json j = report::Json::parse(r.out);
  EXPECT_TRUE(j["injectivity"]["ok"].get<bool>());
  EXPECT_LE(j["round_trip"]["max_error_H_of_G"].get<double>(), 1e-9);
  EXPECT_LE(j["round_trip"]["max_error_G_of_H"].get<double>(), 1e-9);
  EXPECT_TRUE(j["r_default"].get<bool>());
  EXPECT_NE(slurp(path("k.svg")).find("<svg"), std::string::npos);
}

TEST_F(CliTest, TorusHeatmapAndCsv) {
  const Result r = invoke({"scan", "--domain", "torus", "--profile", "disc", "--center", "1,2", "--radius", "1", "--ns",
                           "64", "--ntheta", "16", "--samples-in-json", "--out", path("t.json"), "--csv",
                           path("t.csv"), "--svg", path("t.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string svg = slurp(path("t.svg"));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("class=\"zero\""), std::string::npos);

  const std::string csv = slurp(path("t.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "s,theta,x,y,t,psi,grad,hgrad,m");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 64 * 16);

  // Rendering the saved report again gives the same bytes.
  ASSERT_EQ(invoke({"report", "--in", path("t.json"), "--csv", path("u.csv"), "--svg", path("u.svg")}).code, 0);
  EXPECT_EQ(slurp(path("u.svg")), svg);
  EXPECT_EQ(slurp(path("u.csv")), csv);
}

TEST_F(CliTest, HeatmapRejectsNonParametricReports) {
  EXPECT_EQ(invoke({"scan", "--domain", "koranyi-ball", "--grid", "16", "--svg", path("k.svg")}).code, 1);
  EXPECT_FALSE(fs::exists(path("k.svg")));
  ASSERT_EQ(invoke({"scan", "--domain", "koranyi-ball", "--grid", "16", "--out", path("k.json")}).code, 0);
  EXPECT_EQ(invoke({"report", "--in", path("k.json"), "--svg", path("k.svg")}).code, 1);
  EXPECT_THROW(report::svg_heatmap_from_json(report::read_json(path("k.json"))), ValidationError);
}

TEST_F(CliTest, ReportNeedsReadableInput) {
  EXPECT_EQ(invoke({"report", "--in", path("missing.json"), "--csv", path("x.csv")}).code, 1);
  std::ofstream(path("junk.json")) << "{ not json";
  EXPECT_EQ(invoke({"report", "--in", path("junk.json"), "--csv", path("x.csv")}).code, 1);
}

TEST_F(CliTest, ReproducibleModuloRunInfo) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"scan", "--domain", "koranyi-ball", "--grid", "32", "--seed", "7"},
        std::vector<std::string>{"scan", "--domain", "torus", "--ns", "64", "--ntheta", "16"},
        std::vector<std::string>{"profile-map", "--profile", "polygon", "--samples", "100", "--seed", "3"}}) {
    std::vector<std::string> a1 = args, a2 = args;
    a1.insert(a1.end(), {"--out", path("a.json")});
    a2.insert(a2.end(), {"--out", path("b.json")});
    if (args[0] == "profile-map") {
      const Result r1 = invoke(args), r2 = invoke(args);
      ASSERT_EQ(r1.code, 0);
      EXPECT_EQ(report::without_run_info(report::Json::parse(r1.out)).dump(2),
                report::without_run_info(report::Json::parse(r2.out)).dump(2));
      continue;
    }
    ASSERT_EQ(invoke(a1).code, 0);
    ASSERT_EQ(invoke(a2).code, 0);
    const std::string j1 = report::without_run_info(report::read_json(path("a.json"))).dump(2);
    const std::string j2 = report::without_run_info(report::read_json(path("b.json"))).dump(2);
    EXPECT_EQ(j1, j2) << args[0] << " " << args[2];
    EXPECT_TRUE(report::read_json(path("a.json")).contains("run"));
  }
}

TEST_F(CliTest, SerialFlagGivesSameReport) {
  ASSERT_EQ(invoke({"scan", "--grid", "24", "--out", path("p.json")}).code, 0);
  ASSERT_EQ(invoke({"scan", "--grid", "24", "--serial", "--out", path("s.json")}).code, 0);
  EXPECT_EQ(report::without_run_info(report::read_json(path("p.json"))).dump(),
            report::without_run_info(report::read_json(path("s.json"))).dump());
}

TEST(ReportJson, CertificateAndConventions) {
  const ConvexCertificate cert = certify_convex(ConvexProfile::make(disc_profile(1.0, 2.0, 1.0)), 100);
  const report::Json j = report::to_json(cert, true);
  EXPECT_EQ(j["verdict"], "PASS");
  EXPECT_EQ(j["samples"], 100);
  EXPECT_EQ(j["per_sample"].size(), 100u);
  EXPECT_EQ(j["analytic"]["min_hgrad"], 4.0);

  ScanConfig cfg;
  cfg.n_s = 32;
  cfg.n_theta = 8;
  const report::Json r = report::to_json(scan(TorusDomain::make(disc_profile(1.0, 2.0, 1.0)), cfg));
  EXPECT_EQ(r["finding"], "no characteristic point found at resolution 32x8");
  EXPECT_EQ(r["heatmap"]["m"].size(), 32u * 8u);
  EXPECT_TRUE(r["conventions"].is_object());
  EXPECT_TRUE(r["tolerances"].contains("rank_tol"));
  EXPECT_EQ(report::svg_heatmap_from_json(r), report::svg_heatmap_from_json(r));
}
