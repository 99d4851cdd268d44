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
#ifndef LCURVE_PLANNER_HPP
#define LCURVE_PLANNER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "lcurve/estimator.hpp"

namespace lcurve {

enum class Regime { kInterpolation, kExtrapolation };

std::string_view to_string(Regime regime);

struct Prediction {
  double loss = 0.0;
  Regime regime = Regime::kInterpolation;
};

/// c * n^alpha, marked as extrapolation when n is outside the fit's range.
Prediction extrapolate(const PowerLawFit& fit, uint64_t n);

/// Real-valued (target / c)^(1 / alpha).
double required_sample_size_real(const PowerLawFit& fit, double target_loss);

/// Smallest integer N >= 1 from the ceiling of the inverse, nudged so that
/// extrapolate(fit, N).loss <= target_loss holds in floating point.
uint64_t required_sample_size(const PowerLawFit& fit, double target_loss);

enum class Side { kA, kB };

struct Intersection {
  double n_star = 0.0;          // exact crossing of the two power laws
  uint64_t crossover_size = 0;  // n_star rounded to the nearest sample count
  Side superior_beyond = Side::kA;  // lower loss for N > n_star
};

/// Closed-form crossing of two power laws; clamps are ignored.
Intersection predict_intersection(const PowerLawFit& a, const PowerLawFit& b, double alpha_tol = 1e-9);

struct NoiseImpactRow {
  double target = 0.0;
  double n_clean = 0.0;
  double n_noisy = 0.0;
  double multiplier = 0.0;  // n_noisy / n_clean, before any ceiling
};

struct NoiseImpactReport {
  double delta_alpha = 0.0;  // alpha_noisy - alpha_clean
  std::vector<NoiseImpactRow> rows;

  /// Multiplier for one of the requested targets; throws if absent.
  double multiplier_at(double target) const;
};

NoiseImpactReport noise_impact(const PowerLawFit& clean, const PowerLawFit& noisy,
                               std::span<const double> targets);

}  // namespace lcurve

#endif  // LCURVE_PLANNER_HPP
