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
#ifndef LCURVE_MANIFEST_HPP
#define LCURVE_MANIFEST_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lcurve {

/// One row of the images table. An empty capture_group means "unknown".
struct ImageEntry {
  std::string image_id;
  std::string class_name;
  std::string capture_group;
};

struct ImageRecord {
  std::string image_id;
  std::string true_label;
  std::string assigned_label;
  bool noise_flag = false;
  uint64_t class_rank = 0;
  std::string capture_group;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct NoiseSettings {
  double p = 0.0;
  uint64_t seed = 0;

  friend bool operator==(const NoiseSettings&, const NoiseSettings&) = default;
};

struct ClassDiagnostics {
  std::string class_name;
  uint64_t groups = 0;
  // Adjacent ranks inside the deepest subset that still share a capture group.
  uint64_t adjacent_same_group = 0;

  friend bool operator==(const ClassDiagnostics&, const ClassDiagnostics&) = default;
};

/// Nested, class-balanced training subsets. T_s is the union over classes of
/// the records with class_rank < s / classes.size(), so smaller subsets are
/// prefixes of larger ones.
///
/// Records are stored grouped by class (in `classes` order) and ascending rank.
struct SubsetManifest {
  std::vector<std::string> classes;
  uint64_t per_class_pool = 0;
  std::vector<uint64_t> sizes;
  uint64_t seed = 0;
  std::vector<ImageRecord> records;
  std::optional<NoiseSettings> noise;
  std::vector<ClassDiagnostics> diagnostics;

  uint64_t per_class(uint64_t size) const { return size / classes.size(); }

  /// Records of T_size in storage order.
  std::vector<const ImageRecord*> subset(uint64_t size) const;

  /// Copy holding only the records of T_size; sizes above `size` are dropped.
  SubsetManifest restricted(uint64_t size) const;

  /// Throws kParse on any broken invariant; used after deserialization.
  void validate() const;

  friend bool operator==(const SubsetManifest&, const SubsetManifest&) = default;
};

SubsetManifest build_nested_subsets(std::span<const ImageEntry> images, std::span<const uint64_t> sizes,
                                    uint64_t seed);

/// Flips each label with probability p to a uniformly chosen wrong class. The
/// decision for an image depends only on (seed, image_id), so every subset
/// sees the same flips as the full pool. Labels are always re-drawn from
/// true_label; earlier noise is replaced.
SubsetManifest inject_label_noise(const SubsetManifest& manifest, double p, uint64_t seed);

struct HoldoutSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
};

/// Class-stratified validation holdout of round(fraction * size) images from T_size.
HoldoutSplit holdout_split(const SubsetManifest& manifest, uint64_t size, double fraction = 0.20,
                           uint64_t seed = 0);

}  // namespace lcurve

#endif  // LCURVE_MANIFEST_HPP
