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
#include "lcurve/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "lcurve/error.hpp"
#include "lcurve/keyed_random.hpp"

namespace lcurve {

namespace {

template <typename T>
void shuffle(std::vector<T>& items, keyed::Stream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

void check_sizes(std::span<const uint64_t> sizes, std::size_t class_count) {
  if (sizes.empty()) throw Error(ErrorKind::kParameterDomain, "at least one subset size is required");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw Error(ErrorKind::kParameterDomain, "subset sizes must be positive");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw Error(ErrorKind::kParameterDomain, "subset sizes must be strictly increasing");
    if (sizes[i] % class_count != 0) {
      std::ostringstream os;
      os << "subset size " << sizes[i] << " is not divisible by the class count " << class_count;
      throw Error(ErrorKind::kBalance, os.str());
    }
  }
}

// Swap forward so neighbouring ranks below `depth` come from different capture
// groups where the class allows it. Returns the number of clashes left.
uint64_t interleave_groups(std::vector<const ImageEntry*>& order, std::size_t depth) {
  const auto clash = [&](std::size_t i) {
    return !order[i]->capture_group.empty() && order[i]->capture_group == order[i - 1]->capture_group;
  };
  uint64_t remaining = 0;
  for (std::size_t i = 1; i < std::min(depth, order.size()); ++i) {
    if (!clash(i)) continue;
    const std::string& previous = order[i - 1]->capture_group;
    std::size_t j = i + 1;
    while (j < order.size() && order[j]->capture_group == previous) ++j;
    if (j < order.size()) std::swap(order[i], order[j]);
    else ++remaining;
  }
  return remaining;
}

}  // namespace

std::vector<const ImageRecord*> SubsetManifest::subset(uint64_t size) const {
  const uint64_t depth = per_class(size);
  std::vector<const ImageRecord*> out;
  out.reserve(size);
  for (const auto& r : records) {
    if (r.class_rank < depth) out.push_back(&r);
  }
  return out;
}

SubsetManifest SubsetManifest::restricted(uint64_t size) const {
  if (std::find(sizes.begin(), sizes.end(), size) == sizes.end())
    throw Error(ErrorKind::kUnknownSubset, "subset size " + std::to_string(size) + " is not in the manifest");
  SubsetManifest out = *this;
  out.sizes.erase(std::upper_bound(out.sizes.begin(), out.sizes.end(), size), out.sizes.end());
  const uint64_t depth = per_class(size);
  std::erase_if(out.records, [&](const ImageRecord& r) { return r.class_rank >= depth; });
  out.per_class_pool = depth;
  return out;
}

void SubsetManifest::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::kParse, "invalid manifest: " + what); };
  if (classes.empty()) fail("no classes");
  if (std::set<std::string>(classes.begin(), classes.end()).size() != classes.size()) fail("duplicate class names");
  try {
    check_sizes(sizes, classes.size());
  } catch (const Error& e) {
    fail(e.what());
  }
  if (per_class(sizes.back()) > per_class_pool) fail("largest subset exceeds the per-class pool");

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = i;
  std::unordered_set<std::string> ids;
  std::vector<std::set<uint64_t>> ranks(classes.size());
  std::size_t last_class = 0;
  for (const auto& r : records) {
    if (!ids.insert(r.image_id).second) fail("duplicate image_id " + r.image_id);
    const auto it = index.find(r.true_label);
    if (it == index.end()) fail("unknown class " + r.true_label + " for " + r.image_id);
    if (!index.contains(r.assigned_label)) fail("unknown assigned label for " + r.image_id);
    if (r.noise_flag != (r.assigned_label != r.true_label)) fail("noise_flag disagrees with labels for " + r.image_id);
    if (it->second < last_class) fail("records are not grouped by class");
    last_class = it->second;
    if (!ranks[it->second].insert(r.class_rank).second) fail("duplicate class_rank in class " + r.true_label);
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    // Ranks must form 0..count-1 so that every T_s is a prefix.
    if (!ranks[i].empty() && *ranks[i].rbegin() + 1 != ranks[i].size()) fail("ranks of class " + classes[i] + " have gaps");
    if (ranks[i].size() < per_class_pool) fail("class " + classes[i] + " has fewer records than per_class_pool");
  }
}

SubsetManifest build_nested_subsets(std::span<const ImageEntry> images, std::span<const uint64_t> sizes,
                                    uint64_t seed) {
  std::map<std::string, std::vector<const ImageEntry*>> by_class;
  std::unordered_set<std::string_view> ids;
  for (const auto& img : images) {
    if (img.image_id.empty()) throw Error(ErrorKind::kParameterDomain, "empty image_id");
    if (img.class_name.empty()) throw Error(ErrorKind::kParameterDomain, "empty class for image " + img.image_id);
    if (!ids.insert(img.image_id).second) throw Error(ErrorKind::kParameterDomain, "duplicate image_id " + img.image_id);
    by_class[img.class_name].push_back(&img);
  }
  if (by_class.empty()) throw Error(ErrorKind::kParameterDomain, "no images");
  check_sizes(sizes, by_class.size());

  SubsetManifest m;
  m.seed = seed;
  m.sizes.assign(sizes.begin(), sizes.end());
  const uint64_t depth = sizes.back() / by_class.size();
  m.per_class_pool = UINT64_MAX;
  for (auto& [name, members] : by_class) {
    if (members.size() < depth) {
      std::ostringstream os;
      os << "class " << name << " has " << members.size() << " images, the largest subset needs " << depth;
      throw Error(ErrorKind::kCapacity, os.str());
    }
    m.classes.push_back(name);
    m.per_class_pool = std::min<uint64_t>(m.per_class_pool, members.size());

    // Input order must not matter, only (ids, seed).
    std::sort(members.begin(), members.end(),
              [](const ImageEntry* a, const ImageEntry* b) { return a->image_id < b->image_id; });
    keyed::Stream rng(keyed::combine(seed, keyed::hash_string(name)));
    shuffle(members, rng);

    ClassDiagnostics diag;
    diag.class_name = name;
    std::set<std::string_view> groups;
    for (const auto* e : members) {
      if (!e->capture_group.empty()) groups.insert(e->capture_group);
    }
    diag.groups = groups.size();
    diag.adjacent_same_group = interleave_groups(members, static_cast<std::size_t>(depth));
    m.diagnostics.push_back(diag);

    for (std::size_t rank = 0; rank < members.size(); ++rank) {
      const auto* e = members[rank];
      m.records.push_back({e->image_id, name, name, false, rank, e->capture_group});
    }
  }
  return m;
}

SubsetManifest inject_label_noise(const SubsetManifest& manifest, double p, uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kParameterDomain, "noise probability must lie in [0, 1]");
  if (manifest.classes.size() < 2)
    throw Error(ErrorKind::kNoWrongLabel, "label noise needs at least 2 classes; there is no wrong label to assign");

  SubsetManifest out = manifest;
  out.noise = NoiseSettings{p, seed};
  const auto k = manifest.classes.size();
  for (auto& r : out.records) {
    keyed::Stream rng(keyed::combine(seed, keyed::hash_string(r.image_id)));
    r.assigned_label = r.true_label;
    r.noise_flag = false;
    if (rng.uniform() < p) {
      const auto pick = static_cast<std::size_t>(rng.below(k - 1));
      std::size_t seen = 0;
      for (const auto& name : manifest.classes) {
        if (name == r.true_label) continue;
        if (seen++ == pick) {
          r.assigned_label = name;
          break;
        }
      }
      r.noise_flag = true;
    }
  }
  return out;
}

HoldoutSplit holdout_split(const SubsetManifest& manifest, uint64_t size, double fraction, uint64_t seed) {
  if (std::find(manifest.sizes.begin(), manifest.sizes.end(), size) == manifest.sizes.end())
    throw Error(ErrorKind::kUnknownSubset, "subset size " + std::to_string(size) + " is not in the manifest");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(ErrorKind::kParameterDomain, "holdout fraction must lie in (0, 1)");

  const auto k = manifest.classes.size();
  const uint64_t depth = manifest.per_class(size);
  const auto total = static_cast<uint64_t>(std::llround(fraction * static_cast<double>(size)));
  const uint64_t key = keyed::combine(keyed::combine(manifest.seed, seed), size);

  // Classes that take one extra validation image when total % k != 0.
  std::vector<std::size_t> class_order(k);
  for (std::size_t i = 0; i < k; ++i) class_order[i] = i;
  keyed::Stream order_rng(key);
  shuffle(class_order, order_rng);
  std::vector<uint64_t> quota(k, total / k);
  for (uint64_t i = 0; i < total % k; ++i) ++quota[class_order[i]];

  std::vector<std::vector<const ImageRecord*>> members(k);
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < k; ++i) index[manifest.classes[i]] = i;
  for (const auto& r : manifest.records) {
    if (r.class_rank < depth) members[index.at(r.true_label)].push_back(&r);
  }

  HoldoutSplit split;
  for (std::size_t i = 0; i < k; ++i) {
    auto picked = members[i];
    keyed::Stream rng(keyed::combine(key, keyed::hash_string(manifest.classes[i])));
    shuffle(picked, rng);
    std::unordered_set<const ImageRecord*> validation(picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(quota[i]));
    for (const auto* r : members[i]) {
      (validation.contains(r) ? split.validation : split.train).push_back(r->image_id);
    }
  }
  return split;
}

}  // namespace lcurve
