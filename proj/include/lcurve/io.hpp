/**
 * Copyright 2026 The lcurve Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef LCURVE_IO_HPP
#define LCURVE_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lcurve/curve_model.hpp"
#include "lcurve/estimator.hpp"
#include "lcurve/manifest.hpp"
#include "lcurve/planner.hpp"

namespace lcurve {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kMeasurementHeader = "metric,n,replicate,value";
inline constexpr std::string_view kImagesHeader = "image_id,class,capture_group";

/// All metrics of one measurement file, in order of first appearance.
using MeasurementLog = std::vector<MeasurementSet>;

/// Shortest decimal that parses back to the same double.
std::string format_number(double value);

MeasurementLog parse_measurements(std::string_view text, std::string_view source = "<input>");
MeasurementLog read_measurements(const std::filesystem::path& path);

/// Canonical CSV: header, metrics in log order, rows by (n, replicate).
std::string format_measurements(const MeasurementLog& log);

/// The set for `metric`; throws kParse if the log has no such metric.
const MeasurementSet& select_metric(const MeasurementLog& log, std::string_view metric);

std::vector<ImageEntry> parse_images(std::string_view text, std::string_view source = "<input>");
std::vector<ImageEntry> read_images(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so a failure leaves no file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// "sha256:" followed by the hex digest of `bytes`.
std::string content_digest(std::string_view bytes);

/// UTC ISO-8601; honours SOURCE_DATE_EPOCH when set.
std::string current_timestamp();

struct FitParams {
  uint64_t n_min = 1;
  std::optional<uint64_t> n_max;  // empty: unbounded
  FitMethod method = FitMethod::kLogLog;
  bool on_means = true;
  std::optional<uint64_t> seed;  // bootstrap only
  std::optional<int> draws;
  std::optional<double> confidence;
};

struct FitArtifact {
  std::string metric;
  PowerLawFit fit;
  std::string input_digest;
  std::string tool_version{kToolVersion};
  std::string timestamp;
  FitParams params;
};

struct RegionArtifact {
  std::string metric;
  RegionSegmentation region;
  std::optional<double> plateau;
  double r2_threshold = 0.98;
  std::string input_digest;
  std::string tool_version{kToolVersion};
};

nlohmann::ordered_json to_json(const PowerLawFit& fit);
PowerLawFit fit_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const FitArtifact& artifact);
FitArtifact fit_artifact_from_json(const nlohmann::ordered_json& j);

/// Loads a fit file. Files from `fit --method both` hold two artifacts; pass
/// `method` to choose one.
FitArtifact load_fit_artifact(const std::filesystem::path& path, std::optional<FitMethod> method = std::nullopt);

nlohmann::ordered_json to_json(const RegionArtifact& artifact);
RegionArtifact region_artifact_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const NoiseImpactReport& report);
nlohmann::ordered_json to_json(const Intersection& intersection);
nlohmann::ordered_json to_json(const HoldoutSplit& split, uint64_t size, double fraction, uint64_t seed);

nlohmann::ordered_json to_json(const SubsetManifest& manifest);
SubsetManifest manifest_from_json(const nlohmann::ordered_json& j);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::ordered_json& j);

nlohmann::ordered_json parse_json(std::string_view text, std::string_view source);

}  // namespace lcurve

#endif  // LCURVE_IO_HPP
