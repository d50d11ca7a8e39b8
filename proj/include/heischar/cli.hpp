#pragma once

// Command-line front end: scan | certify | map | profile-map | report.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "heischar/char_analysis.hpp"

namespace heischar::cli {

enum class Command { Scan, Certify, Map, ProfileMap, Report };
const char* to_string(Command c);

struct DomainSpec {
  std::string name = "koranyi-ball";  // koranyi-ball | torus | sphere | half-space
  std::string profile = "disc";       // disc | ellipse | polygon | crescent | half-disc | file
  std::filesystem::path profile_file;
  std::vector<double> center;         // 3 values for balls, 2 for profiles; empty = default
  double radius = 1.0;
  std::vector<double> axes{2.0, 1.0};
  std::string vertices = "0,2;2,2;1,3.5";
  double rounding = 0.25;
  std::vector<double> crescent{1.0, 0.8, 0.8};  // outer radius, offset, inner radius
  double level = 0.0;
  std::vector<double> box{-1.0, 1.0, -1.0, 1.0, -1.0, 1.0};
};

struct RunConfig {
  Command command = Command::Scan;
  DomainSpec domain;
  ScanConfig scan;
  std::optional<double> fd_gradient_step;
  std::optional<double> fd_hessian_step;
  int samples = 10000;
  std::uint64_t seed = 1;
  bool samples_in_json = false;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> svg;
  std::optional<std::filesystem::path> input;
  std::vector<double> point;
  std::vector<double> vector;
  std::vector<double> A;
  std::optional<double> r;

  /// Mesh dimensions >= 8, 0 < tol_char < tol_suspect, positive sample counts.
  void validate() const;
};

struct ParseOutcome {
  std::optional<RunConfig> config;
  int exit_code = 0;
  std::string message;
};

ParseOutcome parse_args(int argc, const char* const* argv);

/// Exit status: 0 success, 1 usage or validation error, 2 certificate FAIL.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

int main(int argc, const char* const* argv);

}  // namespace heischar::cli
