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
#ifndef LCURVE_CURVE_MODEL_HPP
#define LCURVE_CURVE_MODEL_HPP

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lcurve {

/// L(n) = c * n^alpha for a scalar sample count.
template <typename Scalar>
inline Scalar power_law(Scalar c, Scalar alpha, Scalar n) {
  using std::pow;
  return c * pow(n, alpha);
}

/// Coefficient-wise power law over an array of sample counts.
template <typename Derived>
inline auto power_law(typename Derived::Scalar c, typename Derived::Scalar alpha,
                      const Eigen::ArrayBase<Derived>& n) {
  return c * n.pow(alpha);
}

/// Risk metric tag. Two metrics are recognized by name; anything else is kept
/// verbatim as `other`.
class Metric {
 public:
  enum class Kind { kTop1Error, kCrossEntropy, kOther };

  Metric() : Metric(Kind::kTop1Error) {}
  explicit Metric(Kind kind);
  static Metric from_name(std::string name);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Metric& a, const Metric& b) { return a.name_ == b.name_; }

 private:
  Kind kind_;
  std::string name_;
};

struct MeasurementPoint {
  uint64_t n = 1;
  int64_t replicate = 0;
  double value = 0.0;

  friend bool operator==(const MeasurementPoint&, const MeasurementPoint&) = default;
};

/// Risk observations for one metric, kept sorted by (n, replicate).
/// Construction rejects n < 1, negative or non-finite values, and duplicate
/// (n, replicate) pairs.
class MeasurementSet {
 public:
  MeasurementSet() = default;
  MeasurementSet(Metric metric, std::vector<MeasurementPoint> points);

  const Metric& metric() const noexcept { return metric_; }
  std::span<const MeasurementPoint> points() const noexcept { return points_; }
  bool empty() const noexcept { return points_.empty(); }
  std::size_t size() const noexcept { return points_.size(); }

  /// Distinct sample counts in ascending order.
  std::vector<uint64_t> sizes() const;

  /// Points with n_min <= n <= n_max.
  MeasurementSet restricted(uint64_t n_min, uint64_t n_max) const;

  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;

 private:
  Metric metric_;
  std::vector<MeasurementPoint> points_;
};

struct AggregateRow {
  uint64_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single replicate
  std::size_t count = 0;
};

/// One row per distinct n, ascending.
std::vector<AggregateRow> aggregate(const MeasurementSet& ms);

/// Power law clamped between a random-guess plateau and an irreducible floor.
struct ThreePhaseModel {
  double alpha = -0.5;
  double c = 1.0;
  double plateau = 1.0;
  double floor = 0.0;

  /// Throws kParameterDomain unless alpha in (-1, 0), c > 0, plateau > floor >= 0.
  void validate() const;

  /// Sample count at which the power law leaves the plateau.
  double plateau_exit() const { return std::pow(plateau / c, 1.0 / alpha); }
};

double evaluate(const ThreePhaseModel& model, double n);

/// Random-guess loss for k balanced classes: 1 - 1/k for top-1 error, ln k
/// for cross-entropy, nothing for other metrics.
std::optional<double> random_guess_plateau(const Metric& metric, int classes);

enum class NoiseKind {
  kRelative,  // value * (1 + sigma * z)
  kAbsolute,  // value + sigma * z
};

struct SynthOptions {
  int replicates = 5;
  double sigma = 0.0;
  uint64_t seed = 0;
  NoiseKind noise = NoiseKind::kRelative;
  Metric metric{};
};

/// Values below this are raised to it so logarithms stay defined.
inline constexpr double kSynthFloor = 1e-12;

/// Noisy draws from `model` at each size and replicate. Each point's noise is
/// keyed by (seed, n, replicate), independent of generation order.
MeasurementSet synth_curve(const ThreePhaseModel& model, std::span<const uint64_t> sizes,
                           const SynthOptions& options);

}  // namespace lcurve

#endif  // LCURVE_CURVE_MODEL_HPP
