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
#include "lcurve/curve_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lcurve/error.hpp"
#include "lcurve/keyed_random.hpp"

namespace lcurve {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameterDomain: return "parameter-domain";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kLogDomain: return "log-domain";
    case ErrorKind::kNonConvergence: return "non-convergence";
    case ErrorKind::kUndefinedReference: return "undefined-reference";
    case ErrorKind::kNoRegion: return "no-region";
    case ErrorKind::kResamplingImpossible: return "resampling-impossible";
    case ErrorKind::kNonDecreasingCurve: return "non-decreasing-curve";
    case ErrorKind::kParallelCurves: return "parallel-curves";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kBalance: return "balance";
    case ErrorKind::kNoWrongLabel: return "no-wrong-label";
    case ErrorKind::kUnknownSubset: return "unknown-subset";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

Metric::Metric(Kind kind) : kind_(kind) {
  switch (kind) {
    case Kind::kTop1Error: name_ = "top1_error"; break;
    case Kind::kCrossEntropy: name_ = "cross_entropy"; break;
    case Kind::kOther: name_ = "other"; break;
  }
}

Metric Metric::from_name(std::string name) {
  if (name == "top1_error") return Metric(Kind::kTop1Error);
  if (name == "cross_entropy") return Metric(Kind::kCrossEntropy);
  if (name.empty()) throw Error(ErrorKind::kParameterDomain, "metric name is empty");
  Metric m(Kind::kOther);
  m.name_ = std::move(name);
  return m;
}

MeasurementSet::MeasurementSet(Metric metric, std::vector<MeasurementPoint> points)
    : metric_(std::move(metric)), points_(std::move(points)) {
  for (const auto& p : points_) {
    if (p.n < 1) throw Error(ErrorKind::kParameterDomain, "sample count must be >= 1");
    if (!std::isfinite(p.value) || p.value < 0.0) {
      std::ostringstream os;
      os << "loss value must be finite and non-negative (n=" << p.n << ", replicate=" << p.replicate
         << ", value=" << p.value << ")";
      throw Error(ErrorKind::kParameterDomain, os.str());
    }
  }
  std::sort(points_.begin(), points_.end(), [](const auto& a, const auto& b) {
    return a.n != b.n ? a.n < b.n : a.replicate < b.replicate;
  });
  auto dup = std::adjacent_find(points_.begin(), points_.end(), [](const auto& a, const auto& b) {
    return a.n == b.n && a.replicate == b.replicate;
  });
  if (dup != points_.end()) {
    std::ostringstream os;
    os << "duplicate measurement for metric " << metric_.name() << " at n=" << dup->n
       << ", replicate=" << dup->replicate;
    throw Error(ErrorKind::kParameterDomain, os.str());
  }
}

std::vector<uint64_t> MeasurementSet::sizes() const {
  std::vector<uint64_t> out;
  for (const auto& p : points_) {
    if (out.empty() || out.back() != p.n) out.push_back(p.n);
  }
  return out;
}

MeasurementSet MeasurementSet::restricted(uint64_t n_min, uint64_t n_max) const {
  MeasurementSet out;
  out.metric_ = metric_;
  std::copy_if(points_.begin(), points_.end(), std::back_inserter(out.points_),
               [&](const auto& p) { return p.n >= n_min && p.n <= n_max; });
  return out;
}

std::vector<AggregateRow> aggregate(const MeasurementSet& ms) {
  if (ms.empty()) throw Error(ErrorKind::kInsufficientData, "cannot aggregate an empty measurement set");
  std::vector<AggregateRow> rows;
  const auto pts = ms.points();
  for (std::size_t i = 0; i < pts.size();) {
    std::size_t j = i;
    while (j < pts.size() && pts[j].n == pts[i].n) ++j;
    const auto count = j - i;
    double mean = 0.0;
    for (std::size_t k = i; k < j; ++k) mean += pts[k].value;
    mean /= static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t k = i; k < j; ++k) ss += (pts[k].value - mean) * (pts[k].value - mean);
    const double sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
    rows.push_back({pts[i].n, mean, sd, count});
    i = j;
  }
  return rows;
}

void ThreePhaseModel::validate() const {
  std::ostringstream os;
  if (!(alpha > -1.0 && alpha < 0.0)) os << "alpha must lie in (-1, 0), got " << alpha;
  else if (!(c > 0.0) || !std::isfinite(c)) os << "c must be positive, got " << c;
  else if (!(floor >= 0.0)) os << "floor must be non-negative, got " << floor;
  else if (!(plateau > floor) || !std::isfinite(plateau))
    os << "plateau must exceed floor, got plateau=" << plateau << " floor=" << floor;
  else return;
  throw Error(ErrorKind::kParameterDomain, os.str());
}

double evaluate(const ThreePhaseModel& model, double n) {
  model.validate();
  if (!(n >= 1.0)) throw Error(ErrorKind::kParameterDomain, "sample count must be >= 1");
  return std::clamp(power_law(model.c, model.alpha, n), model.floor, model.plateau);
}

std::optional<double> random_guess_plateau(const Metric& metric, int classes) {
  if (classes < 2) throw Error(ErrorKind::kParameterDomain, "need at least 2 classes for a plateau");
  switch (metric.kind()) {
    case Metric::Kind::kTop1Error: return 1.0 - 1.0 / classes;
    case Metric::Kind::kCrossEntropy: return std::log(static_cast<double>(classes));
    case Metric::Kind::kOther: return std::nullopt;
  }
  return std::nullopt;
}

MeasurementSet synth_curve(const ThreePhaseModel& model, std::span<const uint64_t> sizes,
                           const SynthOptions& options) {
  model.validate();
  if (sizes.empty()) throw Error(ErrorKind::kParameterDomain, "sizes must be non-empty");
  if (sizes.front() < 1) throw Error(ErrorKind::kParameterDomain, "sizes must be >= 1");
  if (std::adjacent_find(sizes.begin(), sizes.end(), std::greater_equal<>()) != sizes.end())
    throw Error(ErrorKind::kParameterDomain, "sizes must be strictly increasing");
  if (options.replicates < 1) throw Error(ErrorKind::kParameterDomain, "replicates must be >= 1");
  if (!(options.sigma >= 0.0)) throw Error(ErrorKind::kParameterDomain, "sigma must be >= 0");

  std::vector<MeasurementPoint> points;
  points.reserve(sizes.size() * static_cast<std::size_t>(options.replicates));
  for (uint64_t n : sizes) {
    const double clean = evaluate(model, static_cast<double>(n));
    for (int r = 0; r < options.replicates; ++r) {
      double value = clean;
      if (options.sigma > 0.0) {
        keyed::Stream rng(keyed::combine(keyed::combine(options.seed, n), static_cast<uint64_t>(r)));
        const double z = rng.normal();
        value = options.noise == NoiseKind::kRelative ? clean * (1.0 + options.sigma * z)
                                                      : clean + options.sigma * z;
        value = std::max(value, kSynthFloor);
      }
      points.push_back({n, r, value});
    }
  }
  return MeasurementSet(options.metric, std::move(points));
}

}  // namespace lcurve
