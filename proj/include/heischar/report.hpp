#pragma once

// Report serialization. JSON is the source of truth; CSV and SVG are
// rendered from it.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "heischar/char_analysis.hpp"
#include "heischar/convex_geometry.hpp"

namespace heischar::report {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

struct JsonOptions {
  bool include_samples = false;
  bool include_heatmap = true;
};

Json to_json(const CharacteristicReport& rep, const JsonOptions& opts = {});
Json to_json(const ConvexCertificate& cert, bool include_samples = false);

/// Copy without the "run" object (timestamp, timings, thread count).
Json without_run_info(Json j);

/// One row per sample: s, theta, x, y, t, psi, |grad|, |hgrad|, m. Needs "samples".
std::string csv_from_json(const Json& j);
/// Heatmap of m over (s, theta) with zero-level cells and minima marked.
/// ValidationError for reports without a parametric heatmap.
std::string svg_heatmap_from_json(const Json& j);
std::string svg_heatmap(const CharacteristicReport& rep);
/// Boundary curve of the profile with A, the circle S^1(A, r) and the axis {b = 0}.
std::string svg_profile_sketch(const ConvexProfile& cp);

void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);

}  // namespace heischar::report
