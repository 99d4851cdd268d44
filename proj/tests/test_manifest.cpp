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
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "lcurve/error.hpp"
#include "lcurve/manifest.hpp"

using namespace lcurve;

namespace {

std::vector<ImageEntry> pool(int classes, int per_class, int groups_per_class = 0) {
  std::vector<ImageEntry> out;
  for (int k = 0; k < classes; ++k) {
    for (int i = 0; i < per_class; ++i) {
      const std::string group = groups_per_class > 0 ? "g" + std::to_string(k) + "_" + std::to_string(i % groups_per_class) : "";
      out.push_back({"c" + std::to_string(k) + "_img" + std::to_string(i), "class" + std::to_string(k), group});
    }
  }
  return out;
}

std::set<std::string> ids_of(const std::vector<const ImageRecord*>& recs) {
  std::set<std::string> out;
  for (const auto* r : recs) out.insert(r->image_id);
  return out;
}

std::set<std::string> flips_of(const std::vector<const ImageRecord*>& recs) {
  std::set<std::string> out;
  for (const auto* r : recs) {
    if (r->noise_flag) out.insert(r->image_id);
  }
  return out;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kUsage;
}

const std::vector<uint64_t> kStudySizes{90, 900, 9000, 45000, 90000};

}  // namespace

TEST_CASE("nine-class manifest has the stated per-class counts") {
  const auto images = pool(9, 10100);
  const auto m = build_nested_subsets(images, kStudySizes, 2022);
  CHECK(m.classes.size() == 9);
  CHECK(m.per_class_pool == 10100);
  CHECK(m.records.size() == 90900);
  std::map<std::string, int> t90, t90k;
  for (const auto* r : m.subset(90)) ++t90[r->true_label];
  for (const auto* r : m.subset(90000)) ++t90k[r->true_label];
  for (const auto& cls : m.classes) {
    CHECK(t90[cls] == 10);
    CHECK(t90k[cls] == 10000);
  }
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("a single full-pool size is a permutation of the images") {
  const auto images = pool(3, 40);
  const uint64_t total = 120;
  const auto m = build_nested_subsets(images, std::vector<uint64_t>{total}, 5);
  std::set<std::string> all;
  for (const auto& img : images) all.insert(img.image_id);
  CHECK(ids_of(m.subset(total)) == all);
}

TEST_CASE("brute force: every pair of subsets is nested and balanced") {
  const auto images = pool(4, 60);
  const std::vector<uint64_t> sizes{4, 20, 44, 100, 160, 240};
  for (uint64_t seed = 0; seed < 25; ++seed) {
    const auto m = build_nested_subsets(images, sizes, seed * 7919);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto small = ids_of(m.subset(sizes[i]));
      CHECK(small.size() == sizes[i]);
      std::map<std::string, uint64_t> per;
      for (const auto* r : m.subset(sizes[i])) ++per[r->true_label];
      for (const auto& [cls, count] : per) CHECK(count == sizes[i] / 4);
      for (std::size_t j = i + 1; j < sizes.size(); ++j) {
        const auto large = ids_of(m.subset(sizes[j]));
        CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
      }
    }
  }
}

TEST_CASE("manifest is a function of ids and seed, not input order") {
  auto images = pool(3, 30);
  const auto a = build_nested_subsets(images, std::vector<uint64_t>{30, 90}, 17);
  std::reverse(images.begin(), images.end());
  const auto b = build_nested_subsets(images, std::vector<uint64_t>{30, 90}, 17);
  CHECK(a == b);
  const auto c = build_nested_subsets(images, std::vector<uint64_t>{30, 90}, 18);
  CHECK_FALSE(a.records == c.records);
}

TEST_CASE("capture groups are interleaved when the class allows it") {
  const auto images = pool(2, 200, 10);
  const auto m = build_nested_subsets(images, std::vector<uint64_t>{100, 400}, 3);
  for (const auto& d : m.diagnostics) {
    CHECK(d.groups == 10);
    CHECK(d.adjacent_same_group == 0);
  }
  for (std::size_t i = 1; i < m.records.size(); ++i) {
    const auto& a = m.records[i - 1];
    const auto& b = m.records[i];
    if (a.true_label == b.true_label) CHECK(a.capture_group != b.capture_group);
  }
  // One group per class: nothing to interleave, clashes are counted instead.
  const auto single = build_nested_subsets(pool(2, 20, 1), std::vector<uint64_t>{40}, 3);
  for (const auto& d : single.diagnostics) CHECK(d.adjacent_same_group == 19);
}

TEST_CASE("manifest construction errors") {
  const auto images = pool(3, 10);
  CHECK(kind_of([&] { build_nested_subsets(images, std::vector<uint64_t>{33}, 1); }) == ErrorKind::kCapacity);
  CHECK(kind_of([&] { build_nested_subsets(images, std::vector<uint64_t>{10}, 1); }) == ErrorKind::kBalance);
  CHECK(kind_of([&] { build_nested_subsets(images, std::vector<uint64_t>{12, 9}, 1); }) == ErrorKind::kParameterDomain);
  auto dup = images;
  dup.push_back(images.front());
  CHECK(kind_of([&] { build_nested_subsets(dup, std::vector<uint64_t>{9}, 1); }) == ErrorKind::kParameterDomain);
  try {
    auto short_class = images;
    short_class.pop_back();
    build_nested_subsets(short_class, std::vector<uint64_t>{30}, 1);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("class2") != std::string::npos);
  }
}

TEST_CASE("zero noise leaves the records untouched") {
  const auto m = build_nested_subsets(pool(3, 50), std::vector<uint64_t>{30, 150}, 1);
  const auto n = inject_label_noise(m, 0.0, 77);
  CHECK(n.records == m.records);
  for (const auto& r : n.records) CHECK_FALSE(r.noise_flag);
}

TEST_CASE("full noise flips every label to a wrong class") {
  const auto m = build_nested_subsets(pool(3, 50), std::vector<uint64_t>{150}, 1);
  const auto n = inject_label_noise(m, 1.0, 77);
  for (const auto& r : n.records) {
    CHECK(r.noise_flag);
    CHECK(r.assigned_label != r.true_label);
  }
  CHECK_NOTHROW(n.validate());
}

TEST_CASE("noise needs a wrong label and a probability") {
  const auto one = build_nested_subsets(pool(1, 10), std::vector<uint64_t>{10}, 1);
  CHECK(kind_of([&] { inject_label_noise(one, 0.1, 1); }) == ErrorKind::kNoWrongLabel);
  const auto m = build_nested_subsets(pool(2, 10), std::vector<uint64_t>{20}, 1);
  CHECK(kind_of([&] { inject_label_noise(m, 1.5, 1); }) == ErrorKind::kParameterDomain);
}

TEST_CASE("noise flips are consistent across subsets and reruns") {
  const auto m = build_nested_subsets(pool(9, 1000), std::vector<uint64_t>{90, 900, 4500, 9000}, 8);
  const auto full = inject_label_noise(m, 0.05, 31337);
  const auto again = inject_label_noise(m, 0.05, 31337);
  CHECK(full == again);
  const auto small = inject_label_noise(m.restricted(900), 0.05, 31337);
  std::set<std::string> full_in_900 = flips_of(full.subset(900));
  CHECK(flips_of(small.subset(900)) == full_in_900);
  for (uint64_t s : m.sizes) {
    CHECK(flips_of(full.subset(s)).size() <= s);
    const auto restricted = inject_label_noise(m.restricted(s), 0.05, 31337);
    CHECK(flips_of(restricted.subset(s)) == flips_of(full.subset(s)));
  }
  // Re-applying noise starts again from the true labels.
  CHECK(inject_label_noise(full, 0.05, 31337).records == full.records);
}

TEST_CASE("noise marginal: one image flips at rate p across seeds") {
  const auto m = build_nested_subsets(pool(4, 5), std::vector<uint64_t>{20}, 1);
  const int seeds = 20000;
  const double p = 0.3;
  std::map<std::string, int> flips;
  for (int s = 0; s < seeds; ++s) {
    const auto n = inject_label_noise(m, p, static_cast<uint64_t>(s));
    for (const auto& r : n.records) {
      if (r.noise_flag) {
        ++flips[r.image_id];
        CHECK(r.assigned_label != r.true_label);
      }
    }
  }
  const double bound = 4.0 * std::sqrt(seeds * p * (1 - p));
  for (const auto& r : m.records) CHECK(std::abs(flips[r.image_id] - seeds * p) <= bound);
}

TEST_CASE("holdout: stratified 20 percent of T_900") {
  const auto m = build_nested_subsets(pool(9, 200), std::vector<uint64_t>{90, 900, 1800}, 4);
  const auto split = holdout_split(m, 900, 0.2, 9);
  CHECK(split.validation.size() == 180);
  CHECK(split.train.size() == 720);
  std::map<std::string, int> per;
  std::map<std::string, std::string> label;
  for (const auto& r : m.records) label[r.image_id] = r.true_label;
  for (const auto& id : split.validation) ++per[label[id]];
  for (const auto& cls : m.classes) CHECK(per[cls] == 20);

  std::set<std::string> v(split.validation.begin(), split.validation.end());
  std::set<std::string> t(split.train.begin(), split.train.end());
  std::set<std::string> both;
  std::set_intersection(v.begin(), v.end(), t.begin(), t.end(), std::inserter(both, both.begin()));
  CHECK(both.empty());
  std::set<std::string> all = v;
  all.insert(t.begin(), t.end());
  CHECK(all == ids_of(m.subset(900)));
}

TEST_CASE("holdout: tiny fractions and uneven remainders") {
  const auto m = build_nested_subsets(pool(9, 20), std::vector<uint64_t>{90, 180}, 4);
  const auto tiny = holdout_split(m, 90, 0.01, 1);
  CHECK(tiny.validation.size() == 1);  // round(0.9)
  CHECK(tiny.train.size() == 89);
  const auto uneven = holdout_split(m, 90, 0.25, 1);
  CHECK(uneven.validation.size() == 23);  // round(22.5)
  std::map<std::string, int> per;
  for (const auto& r : m.records) {
    if (std::find(uneven.validation.begin(), uneven.validation.end(), r.image_id) != uneven.validation.end())
      ++per[r.true_label];
  }
  for (const auto& [cls, count] : per) CHECK((count == 2 || count == 3));
  const auto none = holdout_split(m, 90, 0.001, 1);
  CHECK(none.validation.empty());
  CHECK(none.train.size() == 90);
}

TEST_CASE("holdout: deterministic and independent of label noise") {
  const auto m = build_nested_subsets(pool(3, 100), std::vector<uint64_t>{60, 300}, 4);
  const auto a = holdout_split(m, 300, 0.2, 5);
  const auto b = holdout_split(m, 300, 0.2, 5);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  const auto noisy = inject_label_noise(m, 0.2, 1);
  CHECK(holdout_split(noisy, 300, 0.2, 5).validation == a.validation);
  CHECK_FALSE(holdout_split(m, 300, 0.2, 6).validation == a.validation);
  CHECK(kind_of([&] { holdout_split(m, 120, 0.2, 5); }) == ErrorKind::kUnknownSubset);
  CHECK(kind_of([&] { holdout_split(m, 300, 1.0, 5); }) == ErrorKind::kParameterDomain);
}

TEST_CASE("validate catches tampered manifests") {
  const auto m = build_nested_subsets(pool(2, 10), std::vector<uint64_t>{20}, 4);
  auto bad = m;
  bad.records[0].assigned_label = m.classes[1] == bad.records[0].true_label ? m.classes[0] : m.classes[1];
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = m;
  bad.records[1].class_rank = bad.records[0].class_rank;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = m;
  bad.sizes = {21};
  CHECK_THROWS_AS(bad.validate(), Error);
}
