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
#include "lcurve/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

#include "lcurve/curve_model.hpp"
#include "lcurve/estimator.hpp"
#include "lcurve/io.hpp"
#include "lcurve/manifest.hpp"
#include "lcurve/planner.hpp"
#include "lcurve/report.hpp"

namespace lcurve::cli {

using nlohmann::ordered_json;

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kUsageError;
    case ErrorKind::kNonConvergence:
    case ErrorKind::kNoRegion: return kNumericFailure;
    default: return kDataError;
  }
}

namespace {

// Writes to `path`, or to `out` when no path was given.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) out << content;
  else write_file_atomic(path, content);
}

std::optional<FitMethod> optional_method(const std::string& name) {
  if (name.empty()) return std::nullopt;
  return fit_method_from_string(name);
}

struct FitArgs {
  std::string input, metric, method = "loglog", out;
  uint64_t n_min = 1;
  std::optional<uint64_t> n_max;
  bool on_means = true;
  int bootstrap = 0;
  double confidence = 0.95;
  uint64_t seed = 0;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  const std::string text = read_file(a.input);
  const auto log = parse_measurements(text, a.input);
  const auto& ms = select_metric(log, a.metric);

  std::vector<FitMethod> methods;
  if (a.method == "both") methods = {FitMethod::kLogLog, FitMethod::kNonlinear};
  else methods = {fit_method_from_string(a.method)};

  const FitOptions options{a.n_min, a.n_max.value_or(std::numeric_limits<uint64_t>::max()), a.on_means};
  const std::string digest = content_digest(text);
  const std::string stamp = current_timestamp();
  std::vector<FitArtifact> artifacts;
  for (FitMethod m : methods) {
    FitArtifact art;
    art.metric = a.metric;
    art.input_digest = digest;
    art.timestamp = stamp;
    art.params = {a.n_min, a.n_max, m, a.on_means, std::nullopt, std::nullopt, std::nullopt};
    if (a.bootstrap > 0) {
      art.fit = bootstrap_ci(ms, m, options, {a.bootstrap, a.confidence, a.seed});
      art.params.seed = a.seed;
      art.params.draws = a.bootstrap;
      art.params.confidence = a.confidence;
    } else {
      art.fit = fit(ms, m, options);
    }
    artifacts.push_back(std::move(art));
  }

  if (artifacts.size() == 1) {
    emit(a.out, dump(to_json(artifacts.front())), out);
    return kSuccess;
  }
  const Discrepancy d = fit_discrepancy(artifacts[0].fit, artifacts[1].fit);
  ordered_json j;
  j["artifacts"] = {to_json(artifacts[0]), to_json(artifacts[1])};
  j["discrepancy"] = {{"reference", "loglog"}, {"alpha", d.alpha}, {"c", d.c}};
  emit(a.out, dump(j), out);
  return kSuccess;
}

struct RegionArgs {
  std::string input, metric, out;
  std::optional<int> classes;
  std::optional<double> plateau;
  double r2 = 0.98;
  bool on_means = true;
};

int cmd_region(const RegionArgs& a, std::ostream& out) {
  const std::string text = read_file(a.input);
  const auto log = parse_measurements(text, a.input);
  const auto& ms = select_metric(log, a.metric);
  RegionArtifact art;
  art.metric = a.metric;
  art.input_digest = content_digest(text);
  art.r2_threshold = a.r2;
  art.plateau = a.plateau;
  if (!art.plateau && a.classes) art.plateau = random_guess_plateau(ms.metric(), *a.classes);
  art.region = detect_power_law_region(ms, art.plateau, {a.r2, 0.95, a.on_means});
  emit(a.out, dump(to_json(art)), out);
  return kSuccess;
}

struct SynthArgs {
  double alpha = 0.0, c = 0.0, plateau = 0.0, floor = 0.0, sigma = 0.0;
  std::vector<uint64_t> sizes;
  int replicates = 5;
  uint64_t seed = 0;
  std::string noise = "relative", metric = "top1_error", out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const ThreePhaseModel model{a.alpha, a.c, a.plateau, a.floor};
  SynthOptions options;
  options.replicates = a.replicates;
  options.sigma = a.sigma;
  options.seed = a.seed;
  options.noise = a.noise == "absolute" ? NoiseKind::kAbsolute : NoiseKind::kRelative;
  options.metric = Metric::from_name(a.metric);
  const MeasurementLog log{synth_curve(model, a.sizes, options)};
  emit(a.out, format_measurements(log), out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning-curve analysis: power-law fits, extrapolation, and subset manifests", "lcurve"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a power law to one metric");
  fit_cmd->add_option("--input", fit_args.input, "Measurement CSV")->required();
  fit_cmd->add_option("--metric", fit_args.metric, "Metric name")->required();
  fit_cmd->add_option("--n-min", fit_args.n_min, "Smallest N included");
  fit_cmd->add_option("--n-max", fit_args.n_max, "Largest N included");
  fit_cmd->add_option("--method", fit_args.method, "loglog, nonlinear or both")
      ->check(CLI::IsMember({"loglog", "nonlinear", "both"}));
  fit_cmd->add_option("--on-means", fit_args.on_means, "Fit per-N means (true) or every replicate (false)");
  fit_cmd->add_option("--bootstrap", fit_args.bootstrap, "Bootstrap draws for a CI on alpha (0 = none)")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--confidence", fit_args.confidence, "Bootstrap confidence level");
  fit_cmd->add_option("--seed", fit_args.seed, "Bootstrap seed");
  fit_cmd->add_option("--out", fit_args.out, "Output JSON (default: stdout)");

  RegionArgs region_args;
  auto* region_cmd = app.add_subcommand("region", "Detect the power-law region");
  region_cmd->add_option("--input", region_args.input, "Measurement CSV")->required();
  region_cmd->add_option("--metric", region_args.metric, "Metric name")->required();
  region_cmd->add_option("--classes", region_args.classes, "Class count; sets the random-guess plateau");
  region_cmd->add_option("--plateau", region_args.plateau, "Explicit plateau level");
  region_cmd->add_option("--r2", region_args.r2, "Suffix r^2 threshold");
  region_cmd->add_option("--on-means", region_args.on_means, "Fit per-N means");
  region_cmd->add_option("--out", region_args.out, "Output JSON (default: stdout)");

  std::string fit_path, method_name;
  uint64_t n = 1;
  auto* extrapolate_cmd = app.add_subcommand("extrapolate", "Predict the loss at N");
  extrapolate_cmd->add_option("--fit", fit_path, "Fit JSON")->required();
  extrapolate_cmd->add_option("--n", n, "Sample count")->required()->check(CLI::PositiveNumber);
  extrapolate_cmd->add_option("--method", method_name, "Fit to use from a 'both' file");

  double target = 0.0;
  auto* needed_cmd = app.add_subcommand("needed", "Sample size needed to reach a target loss");
  needed_cmd->add_option("--fit", fit_path, "Fit JSON")->required();
  needed_cmd->add_option("--target", target, "Target loss")->required();
  needed_cmd->add_option("--method", method_name, "Fit to use from a 'both' file");

  std::string fit_a, fit_b;
  double alpha_tol = 1e-9;
  auto* intersect_cmd = app.add_subcommand("intersect", "Crossing point of two learning curves");
  intersect_cmd->add_option("--fit-a", fit_a, "First fit JSON")->required();
  intersect_cmd->add_option("--fit-b", fit_b, "Second fit JSON")->required();
  intersect_cmd->add_option("--alpha-tol", alpha_tol, "Exponents closer than this are parallel");
  intersect_cmd->add_option("--method", method_name, "Fit to use from 'both' files");

  std::string clean_path, noisy_path, impact_out;
  std::vector<double> targets;
  auto* impact_cmd = app.add_subcommand("noise-impact", "Data multiplier caused by label noise");
  impact_cmd->add_option("--clean", clean_path, "Fit JSON on clean labels")->required();
  impact_cmd->add_option("--noisy", noisy_path, "Fit JSON on noisy labels")->required();
  impact_cmd->add_option("--targets", targets, "Target losses, comma separated")->required()->delimiter(',');
  impact_cmd->add_option("--method", method_name, "Fit to use from 'both' files");
  impact_cmd->add_option("--out", impact_out, "Output JSON (default: stdout)");

  auto* manifest_cmd = app.add_subcommand("manifest", "Nested subset manifests");
  manifest_cmd->require_subcommand(1);
  std::string images_path, manifest_in, manifest_out;
  std::vector<uint64_t> manifest_sizes;
  uint64_t manifest_seed = 0;
  double noise_p = 0.0, fraction = 0.20;
  uint64_t holdout_size = 0;
  auto* build_cmd = manifest_cmd->add_subcommand("build", "Build nested class-balanced subsets");
  build_cmd->add_option("--images", images_path, "Images CSV")->required();
  build_cmd->add_option("--sizes", manifest_sizes, "Subset sizes, comma separated")->required()->delimiter(',');
  build_cmd->add_option("--seed", manifest_seed, "Shuffle seed");
  build_cmd->add_option("--out", manifest_out, "Output JSON (default: stdout)");
  auto* noise_cmd = manifest_cmd->add_subcommand("noise", "Inject label noise");
  noise_cmd->add_option("--in", manifest_in, "Manifest JSON")->required();
  noise_cmd->add_option("--p", noise_p, "Flip probability")->required();
  noise_cmd->add_option("--seed", manifest_seed, "Noise seed");
  noise_cmd->add_option("--out", manifest_out, "Output JSON (default: stdout)");
  auto* holdout_cmd = manifest_cmd->add_subcommand("holdout", "Validation holdout for one subset");
  holdout_cmd->add_option("--in", manifest_in, "Manifest JSON")->required();
  holdout_cmd->add_option("--size", holdout_size, "Subset size")->required();
  holdout_cmd->add_option("--fraction", fraction, "Validation fraction");
  holdout_cmd->add_option("--seed", manifest_seed, "Holdout seed");
  holdout_cmd->add_option("--out", manifest_out, "Output JSON (default: stdout)");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a noisy three-phase learning curve");
  synth_cmd->add_option("--alpha", synth_args.alpha, "Exponent in (-1, 0)")->required();
  synth_cmd->add_option("--c", synth_args.c, "Coefficient")->required();
  synth_cmd->add_option("--plateau", synth_args.plateau, "Random-guess loss")->required();
  synth_cmd->add_option("--floor", synth_args.floor, "Irreducible loss");
  synth_cmd->add_option("--sizes", synth_args.sizes, "Sample sizes, comma separated")->required()->delimiter(',');
  synth_cmd->add_option("--replicates", synth_args.replicates, "Replicates per size");
  synth_cmd->add_option("--sigma", synth_args.sigma, "Noise standard deviation");
  synth_cmd->add_option("--noise", synth_args.noise, "relative or absolute")
      ->check(CLI::IsMember({"relative", "absolute"}));
  synth_cmd->add_option("--seed", synth_args.seed, "Noise seed");
  synth_cmd->add_option("--metric", synth_args.metric, "Metric name written to the CSV");
  synth_cmd->add_option("--out", synth_args.out, "Output CSV (default: stdout)");

  std::string report_input, report_region, report_out;
  std::vector<std::string> report_fits;
  auto* report_cmd = app.add_subcommand("report", "Log-log SVG plot of measurements and fits");
  report_cmd->add_option("--input", report_input, "Measurement CSV")->required();
  report_cmd->add_option("--fits", report_fits, "Fit JSON files, comma separated")->delimiter(',');
  report_cmd->add_option("--region", report_region, "Region JSON");
  report_cmd->add_option("--out", report_out, "Output SVG")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      app.exit(e, out, err);
      return kSuccess;
    }
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_args, out);
    if (*region_cmd) return cmd_region(region_args, out);
    if (*synth_cmd) return cmd_synth(synth_args, out);
    if (*extrapolate_cmd) {
      const auto art = load_fit_artifact(fit_path, optional_method(method_name));
      const Prediction p = extrapolate(art.fit, n);
      out << format_number(p.loss) << ' ' << to_string(p.regime) << '\n';
      return kSuccess;
    }
    if (*needed_cmd) {
      const auto art = load_fit_artifact(fit_path, optional_method(method_name));
      out << required_sample_size(art.fit, target) << '\n';
      return kSuccess;
    }
    if (*intersect_cmd) {
      const auto a = load_fit_artifact(fit_a, optional_method(method_name));
      const auto b = load_fit_artifact(fit_b, optional_method(method_name));
      const Intersection x = predict_intersection(a.fit, b.fit, alpha_tol);
      out << "n_star " << format_number(x.n_star) << '\n'
          << "crossover_size " << x.crossover_size << '\n'
          << "superior_beyond " << (x.superior_beyond == Side::kA ? "a" : "b") << '\n';
      return kSuccess;
    }
    if (*impact_cmd) {
      const auto clean = load_fit_artifact(clean_path, optional_method(method_name));
      const auto noisy = load_fit_artifact(noisy_path, optional_method(method_name));
      emit(impact_out, dump(to_json(noise_impact(clean.fit, noisy.fit, targets))), out);
      return kSuccess;
    }
    if (*build_cmd) {
      const auto images = read_images(images_path);
      const SubsetManifest m = build_nested_subsets(images, manifest_sizes, manifest_seed);
      m.validate();
      emit(manifest_out, dump(to_json(m)), out);
      return kSuccess;
    }
    if (*noise_cmd) {
      const auto m = manifest_from_json(parse_json(read_file(manifest_in), manifest_in));
      emit(manifest_out, dump(to_json(inject_label_noise(m, noise_p, manifest_seed))), out);
      return kSuccess;
    }
    if (*holdout_cmd) {
      const auto m = manifest_from_json(parse_json(read_file(manifest_in), manifest_in));
      const HoldoutSplit split = holdout_split(m, holdout_size, fraction, manifest_seed);
      emit(manifest_out, dump(to_json(split, holdout_size, fraction, manifest_seed)), out);
      return kSuccess;
    }
    if (*report_cmd) {
      const auto log = read_measurements(report_input);
      std::vector<FitArtifact> fits;
      for (const auto& path : report_fits) {
        const auto j = parse_json(read_file(path), path);
        if (j.contains("artifacts")) {
          for (const auto& item : j.at("artifacts")) fits.push_back(fit_artifact_from_json(item));
        } else {
          fits.push_back(fit_artifact_from_json(j));
        }
      }
      std::optional<RegionArtifact> region;
      if (!report_region.empty())
        region = region_artifact_from_json(parse_json(read_file(report_region), report_region));
      write_report(log, fits, region, report_out);
      return kSuccess;
    }
  } catch (const Error& e) {
    err << "lcurve: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "lcurve: error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace lcurve::cli
