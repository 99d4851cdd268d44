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
#include "lcurve/planner.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lcurve {

std::string_view to_string(Regime regime) {
  return regime == Regime::kInterpolation ? "interpolation" : "extrapolation";
}

Prediction extrapolate(const PowerLawFit& fit, uint64_t n) {
  if (n < 1) throw Error(ErrorKind::kParameterDomain, "sample count must be >= 1");
  const bool inside = n >= fit.n_min && n <= fit.n_max;
  return {power_law(fit.c, fit.alpha, static_cast<double>(n)),
          inside ? Regime::kInterpolation : Regime::kExtrapolation};
}

double required_sample_size_real(const PowerLawFit& fit, double target_loss) {
  if (!(target_loss > 0.0)) throw Error(ErrorKind::kParameterDomain, "target loss must be positive");
  if (!(fit.alpha < 0.0)) {
    std::ostringstream os;
    os << "fitted curve is non-decreasing (alpha=" << fit.alpha << "); no sample size reaches the target";
    throw Error(ErrorKind::kNonDecreasingCurve, os.str());
  }
  return std::pow(target_loss / fit.c, 1.0 / fit.alpha);
}

uint64_t required_sample_size(const PowerLawFit& fit, double target_loss) {
  const double real = required_sample_size_real(fit, target_loss);
  if (!(real < 0x1.0p62)) {
    std::ostringstream os;
    os << "required sample size for target " << target_loss << " overflows (" << real << ")";
    throw Error(ErrorKind::kParameterDomain, os.str());
  }
  auto n = static_cast<uint64_t>(std::max(1.0, std::ceil(real)));
  while (extrapolate(fit, n).loss > target_loss) ++n;
  return n;
}

Intersection predict_intersection(const PowerLawFit& a, const PowerLawFit& b, double alpha_tol) {
  if (!(std::abs(a.alpha - b.alpha) > alpha_tol)) {
    std::ostringstream os;
    os << "exponents agree within " << alpha_tol << " (" << a.alpha << " vs " << b.alpha
       << "); curves are parallel or identical";
    throw Error(ErrorKind::kParallelCurves, os.str());
  }
  // Evaluate in a canonical order so swapping the arguments is bit-identical.
  const bool a_first = a.alpha < b.alpha || (a.alpha == b.alpha && a.c <= b.c);
  const PowerLawFit& p = a_first ? a : b;
  const PowerLawFit& q = a_first ? b : a;

  Intersection out;
  out.n_star = std::pow(p.c / q.c, 1.0 / (q.alpha - p.alpha));
  out.crossover_size = static_cast<uint64_t>(std::max(1.0, std::round(out.n_star)));
  out.superior_beyond = a.alpha < b.alpha ? Side::kA : Side::kB;
  return out;
}

double NoiseImpactReport::multiplier_at(double target) const {
  for (const auto& row : rows) {
    if (row.target == target) return row.multiplier;
  }
  std::ostringstream os;
  os << "target " << target << " was not evaluated";
  throw Error(ErrorKind::kParameterDomain, os.str());
}

NoiseImpactReport noise_impact(const PowerLawFit& clean, const PowerLawFit& noisy,
                               std::span<const double> targets) {
  NoiseImpactReport report;
  report.delta_alpha = noisy.alpha - clean.alpha;
  for (double target : targets) {
    NoiseImpactRow row;
    row.target = target;
    row.n_clean = required_sample_size_real(clean, target);
    row.n_noisy = required_sample_size_real(noisy, target);
    row.multiplier = row.n_noisy / row.n_clean;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace lcurve
