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
#include "lcurve/estimator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lcurve/keyed_random.hpp"

namespace lcurve {

std::string_view to_string(FitMethod method) {
  return method == FitMethod::kLogLog ? "loglog" : "nonlinear";
}

FitMethod fit_method_from_string(std::string_view name) {
  if (name == "loglog") return FitMethod::kLogLog;
  if (name == "nonlinear") return FitMethod::kNonlinear;
  throw Error(ErrorKind::kUsage, "unknown fit method '" + std::string(name) + "'");
}

namespace detail {

LineFit fit_line(const Eigen::Ref<const Eigen::ArrayXd>& x, const Eigen::Ref<const Eigen::ArrayXd>& y) {
  const double x_mean = x.mean();
  const double y_mean = y.mean();
  const Eigen::ArrayXd dx = x - x_mean;
  const Eigen::ArrayXd dy = y - y_mean;
  const double sxx = dx.square().sum();
  if (!(sxx > 0.0)) throw Error(ErrorKind::kInsufficientData, "regressor is constant");
  LineFit out;
  out.slope = (dx * dy).sum() / sxx;
  out.intercept = y_mean - out.slope * x_mean;
  out.rss = (y - (out.intercept + out.slope * x)).square().sum();
  // Compare the range, not tss: centering identical values can leave ulp noise.
  const double tss = dy.square().sum();
  if (y.maxCoeff() > y.minCoeff() && tss > 0.0) out.r_squared = std::clamp(1.0 - out.rss / tss, 0.0, 1.0);
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::kInsufficientData, "percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

}  // namespace detail

namespace {

struct Samples {
  Eigen::ArrayXd n;
  Eigen::ArrayXd y;
  uint64_t n_min = 0;
  uint64_t n_max = 0;
};

// Points of `ms` inside the fit range, either per replicate or as per-N means.
Samples collect(const MeasurementSet& ms, const FitOptions& options, bool require_positive) {
  const MeasurementSet in_range = ms.restricted(options.n_min, options.n_max);
  const auto sizes = in_range.sizes();
  if (sizes.size() < 2) {
    std::ostringstream os;
    os << "need at least 2 distinct sample sizes in [" << options.n_min << ", " << options.n_max
       << "] for metric " << ms.metric().name() << ", found " << sizes.size();
    throw Error(ErrorKind::kInsufficientData, os.str());
  }
  if (require_positive) {
    for (const auto& p : in_range.points()) {
      if (!(p.value > 0.0)) {
        std::ostringstream os;
        os << "log of non-positive value " << p.value << " at n=" << p.n << ", replicate=" << p.replicate;
        throw Error(ErrorKind::kLogDomain, os.str());
      }
    }
  }
  Samples s;
  s.n_min = sizes.front();
  s.n_max = sizes.back();
  if (options.on_means) {
    const auto rows = aggregate(in_range);
    s.n.resize(static_cast<Eigen::Index>(rows.size()));
    s.y.resize(s.n.size());
    for (Eigen::Index i = 0; i < s.n.size(); ++i) {
      s.n[i] = static_cast<double>(rows[static_cast<std::size_t>(i)].n);
      s.y[i] = rows[static_cast<std::size_t>(i)].mean;
    }
  } else {
    const auto pts = in_range.points();
    s.n.resize(static_cast<Eigen::Index>(pts.size()));
    s.y.resize(s.n.size());
    for (Eigen::Index i = 0; i < s.n.size(); ++i) {
      s.n[i] = static_cast<double>(pts[static_cast<std::size_t>(i)].n);
      s.y[i] = pts[static_cast<std::size_t>(i)].value;
    }
  }
  return s;
}

detail::LineFit loglog_line(const Eigen::ArrayXd& n, const Eigen::ArrayXd& y) {
  return detail::fit_line(n.log(), y.log());
}

struct Iterate {
  double c = 0.0;
  double alpha = 0.0;
  double rss = 0.0;
  int iterations = 0;
};

Iterate gauss_newton(const Eigen::ArrayXd& n, const Eigen::ArrayXd& y, double c, double alpha,
                     const NonlinearOptions& solver) {
  const Eigen::ArrayXd log_n = n.log();
  const auto rss_at = [&](double cc, double aa) { return (y - power_law(cc, aa, n)).square().sum(); };
  // Residuals at the level of round-off count as an exact fit.
  const double exact = 1e-28 * y.square().sum();

  double rss = rss_at(c, alpha);
  for (int it = 1; it <= solver.max_iterations; ++it) {
    if (rss <= exact) return {c, alpha, rss, it - 1};

    const Eigen::ArrayXd basis = n.pow(alpha);
    Eigen::MatrixX2d jacobian(n.size(), 2);
    jacobian.col(0) = basis.matrix();
    jacobian.col(1) = (c * basis * log_n).matrix();
    const Eigen::VectorXd residual = (y - c * basis).matrix();
    const Eigen::Vector2d step = jacobian.colPivHouseholderQr().solve(residual);

    double t = 1.0;
    bool accepted = false;
    double c_next = c, alpha_next = alpha, rss_next = rss;
    for (int h = 0; h <= solver.max_halvings; ++h, t *= 0.5) {
      c_next = c + t * step[0];
      alpha_next = alpha + t * step[1];
      if (!(c_next > 0.0) || !std::isfinite(alpha_next)) continue;
      rss_next = rss_at(c_next, alpha_next);
      if (rss_next < rss) {
        accepted = true;
        break;
      }
    }
    // No descent along the Gauss-Newton direction: stationary to working precision.
    if (!accepted) return {c, alpha, rss, it};

    const double relative_change = (rss - rss_next) / rss;
    c = c_next;
    alpha = alpha_next;
    rss = rss_next;
    if (relative_change < solver.relative_tolerance) return {c, alpha, rss, it};
  }
  std::ostringstream os;
  os << "Gauss-Newton did not converge in " << solver.max_iterations << " iterations (alpha=" << alpha
     << ", c=" << c << ", rss=" << rss << ")";
  throw NonConvergenceError(os.str(), alpha, c, solver.max_iterations);
}

std::optional<double> linear_r_squared(const Eigen::ArrayXd& y, double rss) {
  const double tss = (y - y.mean()).square().sum();
  if (!(y.maxCoeff() > y.minCoeff() && tss > 0.0)) return std::nullopt;
  return std::clamp(1.0 - rss / tss, 0.0, 1.0);
}

}  // namespace

PowerLawFit fit_loglog(const MeasurementSet& ms, const FitOptions& options) {
  const Samples s = collect(ms, options, true);
  const auto line = loglog_line(s.n, s.y);
  PowerLawFit fit;
  fit.alpha = line.slope;
  fit.c = std::exp(line.intercept);
  fit.method = FitMethod::kLogLog;
  fit.n_min = s.n_min;
  fit.n_max = s.n_max;
  fit.rss = line.rss;
  fit.r_squared = line.r_squared;
  fit.on_means = options.on_means;
  fit.points_used = static_cast<std::size_t>(s.n.size());
  return fit;
}

PowerLawFit fit_nonlinear(const MeasurementSet& ms, const FitOptions& options,
                          const std::optional<PowerLawFit>& init, const NonlinearOptions& solver) {
  const Samples s = collect(ms, options, false);
  double c0 = 0.0, alpha0 = 0.0;
  if (init) {
    c0 = init->c;
    alpha0 = init->alpha;
  } else {
    // Zero losses are legal here; start from the log-log fit of the positive ones.
    const Eigen::Index positive = (s.y > 0.0).count();
    if (positive == s.y.size()) {
      const auto line = loglog_line(s.n, s.y);
      c0 = std::exp(line.intercept);
      alpha0 = line.slope;
    } else {
      Eigen::ArrayXd n(positive), y(positive);
      for (Eigen::Index i = 0, k = 0; i < s.y.size(); ++i) {
        if (s.y[i] > 0.0) {
          n[k] = s.n[i];
          y[k++] = s.y[i];
        }
      }
      if (positive < 2 || n.minCoeff() == n.maxCoeff())
        throw Error(ErrorKind::kLogDomain, "too few positive values to initialize the nonlinear fit");
      const auto line = loglog_line(n, y);
      c0 = std::exp(line.intercept);
      alpha0 = line.slope;
    }
  }
  if (!(c0 > 0.0)) throw Error(ErrorKind::kParameterDomain, "initial c must be positive");

  const Iterate result = gauss_newton(s.n, s.y, c0, alpha0, solver);
  PowerLawFit fit;
  fit.alpha = result.alpha;
  fit.c = result.c;
  fit.method = FitMethod::kNonlinear;
  fit.n_min = s.n_min;
  fit.n_max = s.n_max;
  fit.rss = result.rss;
  fit.r_squared = linear_r_squared(s.y, result.rss);
  fit.on_means = options.on_means;
  fit.points_used = static_cast<std::size_t>(s.n.size());
  fit.iterations = result.iterations;
  return fit;
}

PowerLawFit fit(const MeasurementSet& ms, FitMethod method, const FitOptions& options) {
  return method == FitMethod::kLogLog ? fit_loglog(ms, options) : fit_nonlinear(ms, options);
}

Discrepancy fit_discrepancy(const PowerLawFit& a, const PowerLawFit& b) {
  if (a.alpha == 0.0)
    throw Error(ErrorKind::kUndefinedReference, "reference fit has alpha = 0; relative discrepancy undefined");
  if (a.n_max < b.n_min || b.n_max < a.n_min)
    throw Error(ErrorKind::kParameterDomain, "fits cover disjoint sample-size ranges");
  return {std::abs(a.alpha - b.alpha) / std::abs(a.alpha), std::abs(a.c - b.c) / std::abs(a.c)};
}

RegionSegmentation detect_power_law_region(const MeasurementSet& ms, std::optional<double> plateau,
                                           const RegionOptions& options) {
  const auto rows = aggregate(ms);
  if (rows.size() < 4) {
    throw Error(ErrorKind::kInsufficientData,
                "region detection needs at least 4 distinct sample sizes, found " + std::to_string(rows.size()));
  }
  const uint64_t n_last = rows.back().n;

  RegionSegmentation seg;
  std::optional<std::size_t> start;
  // A two-point suffix is always a perfect line, so candidates keep three or more.
  for (std::size_t i = 0; i + 3 <= rows.size(); ++i) {
    const auto suffix = fit_loglog(ms, {rows[i].n, n_last, options.on_means});
    RegionCandidate cand;
    cand.n = rows[i].n;
    cand.r_squared = suffix.r_squared;
    cand.alpha = suffix.alpha;
    cand.mean = rows[i].mean;
    cand.below_plateau = !plateau || rows[i].mean < options.plateau_margin * *plateau;
    seg.diagnostics.push_back(cand);
    if (!start && cand.below_plateau && suffix.r_squared.value_or(0.0) >= options.r2_threshold) start = i;
  }
  if (!start) {
    std::ostringstream os;
    os << "no suffix of the N-grid reaches r^2 >= " << options.r2_threshold;
    if (plateau) os << " below " << options.plateau_margin << " x plateau " << *plateau;
    throw NoRegionError(os.str(), seg.diagnostics);
  }
  seg.n_start_power_law = rows[*start].n;
  seg.alpha = seg.diagnostics[*start].alpha;

  // Trailing windows of three means whose slope is flatter than alpha/4.
  const auto flattened = [&](std::size_t j) {
    Eigen::ArrayXd x(3), y(3);
    for (Eigen::Index k = 0; k < 3; ++k) {
      const auto& row = rows[j + static_cast<std::size_t>(k)];
      x[k] = std::log(static_cast<double>(row.n));
      y[k] = std::log(row.mean);
    }
    return detail::fit_line(x, y).slope > seg.alpha / 4.0;
  };
  std::optional<std::size_t> end;
  for (std::size_t j = rows.size() - 3 + 1; j-- > *start;) {
    if (!flattened(j)) break;
    end = j;
  }
  if (end) seg.n_end_power_law = rows[*end].n;
  return seg;
}

PowerLawFit bootstrap_ci(const MeasurementSet& ms, FitMethod method, const FitOptions& options,
                         const BootstrapOptions& bootstrap) {
  if (bootstrap.draws < 1) throw Error(ErrorKind::kParameterDomain, "bootstrap needs at least one draw");
  if (!(bootstrap.confidence > 0.0 && bootstrap.confidence < 1.0))
    throw Error(ErrorKind::kParameterDomain, "confidence must lie in (0, 1)");

  PowerLawFit base = fit(ms, method, options);

  const MeasurementSet in_range = ms.restricted(options.n_min, options.n_max);
  struct Group {
    double n;
    std::vector<double> values;
  };
  std::vector<Group> groups;
  for (const auto& p : in_range.points()) {
    if (groups.empty() || groups.back().n != static_cast<double>(p.n)) groups.push_back({static_cast<double>(p.n), {}});
    groups.back().values.push_back(p.value);
  }
  for (const auto& g : groups) {
    if (g.values.size() < 2) {
      std::ostringstream os;
      os << "case resampling needs >= 2 replicates per sample size; n=" << g.n
         << " has one (residual bootstrap is not supported)";
      throw Error(ErrorKind::kResamplingImpossible, os.str());
    }
  }

  const auto rows = static_cast<Eigen::Index>(options.on_means ? groups.size() : in_range.size());
  Eigen::ArrayXd n(rows), y(rows);
  std::vector<double> alphas;
  alphas.reserve(static_cast<std::size_t>(bootstrap.draws));
  for (int d = 0; d < bootstrap.draws; ++d) {
    keyed::Stream rng(keyed::combine(bootstrap.seed, static_cast<uint64_t>(d)));
    Eigen::Index k = 0;
    for (const auto& g : groups) {
      const auto m = static_cast<uint64_t>(g.values.size());
      if (options.on_means) {
        double sum = 0.0;
        for (uint64_t r = 0; r < m; ++r) sum += g.values[rng.below(m)];
        n[k] = g.n;
        y[k++] = sum / static_cast<double>(m);
      } else {
        for (uint64_t r = 0; r < m; ++r) {
          n[k] = g.n;
          y[k++] = g.values[rng.below(m)];
        }
      }
    }
    if (method == FitMethod::kLogLog) {
      alphas.push_back(loglog_line(n, y).slope);
    } else {
      alphas.push_back(gauss_newton(n, y, base.c, base.alpha, NonlinearOptions{}).alpha);
    }
  }
  const double tail = (1.0 - bootstrap.confidence) / 2.0;
  base.ci_alpha = Interval{detail::percentile(alphas, tail), detail::percentile(alphas, 1.0 - tail),
                           bootstrap.confidence};
  return base;
}

}  // namespace lcurve
