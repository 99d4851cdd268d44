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
#ifndef LCURVE_ESTIMATOR_HPP
#define LCURVE_ESTIMATOR_HPP

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "lcurve/curve_model.hpp"
#include "lcurve/error.hpp"

namespace lcurve {

enum class FitMethod { kLogLog, kNonlinear };

std::string_view to_string(FitMethod method);
FitMethod fit_method_from_string(std::string_view name);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double confidence = 0.95;
};

/// Fitted L(N) = c * N^alpha.
///
/// `rss` and `r_squared` live in the space the fit minimized: log-log for
/// kLogLog, linear for kNonlinear. `r_squared` is empty when the responses
/// have zero variance.
struct PowerLawFit {
  double alpha = 0.0;
  double c = 1.0;
  FitMethod method = FitMethod::kLogLog;
  uint64_t n_min = 0;
  uint64_t n_max = 0;
  double rss = 0.0;
  std::optional<double> r_squared;
  std::optional<Interval> ci_alpha;
  bool on_means = true;
  std::size_t points_used = 0;
  int iterations = 0;  // Gauss-Newton steps; 0 for the closed-form fit
};

struct FitOptions {
  uint64_t n_min = 1;
  uint64_t n_max = std::numeric_limits<uint64_t>::max();
  bool on_means = true;
};

/// Ordinary least squares of log(value) on log(N).
PowerLawFit fit_loglog(const MeasurementSet& ms, const FitOptions& options = {});

struct NonlinearOptions {
  double relative_tolerance = 1e-10;
  int max_iterations = 200;
  int max_halvings = 30;
};

/// Least squares in linear space by damped Gauss-Newton with step halving.
/// Starts from `init` when given, otherwise from fit_loglog on the same data.
/// Throws NonConvergenceError with the last iterate when the iteration budget
/// runs out.
PowerLawFit fit_nonlinear(const MeasurementSet& ms, const FitOptions& options = {},
                          const std::optional<PowerLawFit>& init = std::nullopt,
                          const NonlinearOptions& solver = {});

PowerLawFit fit(const MeasurementSet& ms, FitMethod method, const FitOptions& options = {});

struct Discrepancy {
  double alpha = 0.0;  // |alpha_a - alpha_b| / |alpha_a|
  double c = 0.0;      // |c_a - c_b| / |c_a|
};

/// Relative difference of `b` against reference `a`.
Discrepancy fit_discrepancy(const PowerLawFit& a, const PowerLawFit& b);

struct RegionCandidate {
  uint64_t n = 0;
  std::optional<double> r_squared;  // of the log-log fit over all N' >= n
  double alpha = 0.0;
  double mean = 0.0;
  bool below_plateau = true;
};

struct RegionSegmentation {
  uint64_t n_start_power_law = 0;
  std::optional<uint64_t> n_end_power_law;
  double alpha = 0.0;  // slope of the accepted suffix fit
  std::vector<RegionCandidate> diagnostics;
};

struct RegionOptions {
  double r2_threshold = 0.98;
  double plateau_margin = 0.95;  // mean must be below margin * plateau
  bool on_means = true;
};

class NoRegionError : public Error {
 public:
  NoRegionError(const std::string& what, std::vector<RegionCandidate> diagnostics)
      : Error(ErrorKind::kNoRegion, what), diagnostics_(std::move(diagnostics)) {}

  const std::vector<RegionCandidate>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<RegionCandidate> diagnostics_;
};

/// Smallest grid N whose suffix is log-linear (r^2 >= threshold) and, when a
/// plateau is given, whose mean has left it. The irreducible-error phase is
/// reported when the trailing three-point slopes flatten above alpha/4.
RegionSegmentation detect_power_law_region(const MeasurementSet& ms,
                                           std::optional<double> plateau = std::nullopt,
                                           const RegionOptions& options = {});

struct BootstrapOptions {
  int draws = 1000;
  double confidence = 0.95;
  uint64_t seed = 0;
};

/// Case-resampling percentile bootstrap on alpha. Replicates are resampled
/// with replacement within each N; each draw is keyed by (seed, draw index).
PowerLawFit bootstrap_ci(const MeasurementSet& ms, FitMethod method, const FitOptions& options = {},
                         const BootstrapOptions& bootstrap = {});

namespace detail {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
  std::optional<double> r_squared;
};

/// Least-squares line y = intercept + slope * x; x must not be constant.
LineFit fit_line(const Eigen::Ref<const Eigen::ArrayXd>& x, const Eigen::Ref<const Eigen::ArrayXd>& y);

/// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

}  // namespace detail

}  // namespace lcurve

#endif  // LCURVE_ESTIMATOR_HPP
