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
#ifndef LCURVE_REPORT_HPP
#define LCURVE_REPORT_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "lcurve/io.hpp"

namespace lcurve {

struct Report {
  std::string svg;
  std::string table;  // CSV of every plotted number
};

// SVG element classes, one panel per metric:
//   polygon.band          mean +/- 1 std
//   polyline.data-line    per phase: .small-data, .power-law, .irreducible
//   circle.marker         per-N means
//   path.fit              dotted fitted line over the fit's n_range
//   circle.intersection   crossing of two fits of the same metric
Report render_report(const MeasurementLog& log, std::span<const FitArtifact> fits,
                     const std::optional<RegionArtifact>& region);

/// Renders and writes `path` plus the table next to it (extension .csv).
/// Nothing is written if rendering fails.
void write_report(const MeasurementLog& log, std::span<const FitArtifact> fits,
                  const std::optional<RegionArtifact>& region, const std::filesystem::path& path);

std::filesystem::path report_table_path(const std::filesystem::path& svg_path);

}  // namespace lcurve

#endif  // LCURVE_REPORT_HPP
