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

#include <fstream>
#include <sstream>

#include "lcurve/cli.hpp"
#include "lcurve/io.hpp"
#include "test_support.hpp"

using namespace lcurve;
using lcurve::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

// Drops the quarantined timestamp lines before comparing JSON outputs.
std::string without_timestamps(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("synth then fit recovers the generating parameters") {
  TempDir dir;
  const auto data = dir / "data.csv";
  const auto r = run({"synth", "--alpha", "-0.62", "--c", "34.2", "--plateau", "0.9", "--sizes",
                      "900,1800,3600,9000,22500,45000,90000", "--replicates", "5", "--sigma", "0", "--out", data});
  REQUIRE(r.code == 0);
  for (const char* method : {"loglog", "nonlinear"}) {
    const auto f = run({"fit", "--input", data, "--metric", "top1_error", "--method", method, "--out", dir / "fit.json"});
    REQUIRE(f.code == 0);
    const auto art = load_fit_artifact(dir / "fit.json");
    CHECK(art.fit.alpha == doctest::Approx(-0.62).epsilon(1e-9));
    CHECK(art.fit.c == doctest::Approx(34.2).epsilon(1e-9));
    CHECK(art.input_digest == content_digest(read_file(data)));
    CHECK(art.tool_version == kToolVersion);
  }
}

TEST_CASE("fit --method both carries the discrepancy of its two artifacts") {
  TempDir dir;
  const auto data = dir / "hetero.csv";
  REQUIRE(run({"synth", "--alpha", "-0.6", "--c", "29.6", "--plateau", "1", "--sizes",
               "900,1800,3600,9000,22500,45000,90000", "--sigma", "0.05", "--noise", "absolute", "--seed", "4", "--out",
               data})
              .code == 0);
  REQUIRE(run({"fit", "--input", data, "--metric", "top1_error", "--method", "both", "--out", dir / "both.json"}).code == 0);
  const auto j = parse_json(read_file(dir / "both.json"), "both");
  const auto ll = fit_artifact_from_json(j["artifacts"][0]);
  const auto nl = fit_artifact_from_json(j["artifacts"][1]);
  CHECK(ll.fit.method == FitMethod::kLogLog);
  CHECK(nl.fit.method == FitMethod::kNonlinear);
  const auto d = fit_discrepancy(ll.fit, nl.fit);
  CHECK(j["discrepancy"]["alpha"].get<double>() == d.alpha);
  CHECK(j["discrepancy"]["c"].get<double>() == d.c);
  CHECK(d.alpha > 0.0);

  // A 'both' file needs a method choice downstream.
  CHECK(run({"extrapolate", "--fit", dir / "both.json", "--n", "100"}).code == cli::kDataError);
  CHECK(run({"extrapolate", "--fit", dir / "both.json", "--n", "100", "--method", "nonlinear"}).code == 0);
}

TEST_CASE("fit with bootstrap echoes its parameters") {
  TempDir dir;
  const auto data = dir / "d.csv";
  REQUIRE(run({"synth", "--alpha", "-0.5", "--c", "3", "--plateau", "5", "--sizes", "100,200,400,800", "--sigma", "0.05",
               "--out", data})
              .code == 0);
  const auto r = run({"fit", "--input", data, "--metric", "top1_error", "--bootstrap", "100", "--seed", "9"});
  REQUIRE(r.code == 0);
  const auto art = fit_artifact_from_json(parse_json(r.out, "stdout"));
  REQUIRE(art.fit.ci_alpha.has_value());
  CHECK(*art.params.draws == 100);
  CHECK(*art.params.seed == 9);
}

TEST_CASE("extrapolate, needed and intersect print plain results") {
  TempDir dir;
  FitArtifact a;
  a.metric = "top1_error";
  a.fit.alpha = -0.5;
  a.fit.c = 1.0;
  a.fit.n_min = 100;
  a.fit.n_max = 1000;
  write(dir / "a.json", dump(to_json(a)));
  FitArtifact b = a;
  b.fit.alpha = -0.3;
  b.fit.c = 0.25;
  write(dir / "b.json", dump(to_json(b)));

  auto r = run({"extrapolate", "--fit", dir / "a.json", "--n", "10000"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.01 extrapolation\n");
  CHECK(run({"extrapolate", "--fit", dir / "a.json", "--n", "400"}).out == "0.05 interpolation\n");

  r = run({"needed", "--fit", dir / "a.json", "--target", "0.01"});
  CHECK(r.out == "10000\n");

  r = run({"intersect", "--fit-a", dir / "a.json", "--fit-b", dir / "b.json"});
  CHECK(r.code == 0);
  CHECK(r.out.find("crossover_size 1024\n") != std::string::npos);
  CHECK(r.out.find("superior_beyond a\n") != std::string::npos);
  CHECK(run({"intersect", "--fit-a", dir / "a.json", "--fit-b", dir / "a.json"}).code == cli::kDataError);
}

TEST_CASE("noise-impact emits a report") {
  TempDir dir;
  FitArtifact clean;
  clean.metric = "top1_error";
  clean.fit.alpha = -0.62;
  clean.fit.c = 34.0;
  clean.fit.n_min = 900;
  clean.fit.n_max = 90000;
  FitArtifact noisy = clean;
  noisy.fit.alpha = -0.378;
  noisy.fit.c = 8.0;
  write(dir / "clean.json", dump(to_json(clean)));
  write(dir / "noisy.json", dump(to_json(noisy)));
  const auto r = run({"noise-impact", "--clean", dir / "clean.json", "--noisy", dir / "noisy.json", "--targets", "0.1,0.05"});
  REQUIRE(r.code == 0);
  const auto j = parse_json(r.out, "stdout");
  CHECK(j["delta_alpha"].get<double>() == doctest::Approx(0.242).epsilon(1e-12));
  CHECK(j["multipliers"].size() == 2);
}

TEST_CASE("manifest subcommands chain through files") {
  TempDir dir;
  std::string images = "image_id,class,capture_group\n";
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 20; ++i) images += "k" + std::to_string(k) + "_" + std::to_string(i) + ",cls" + std::to_string(k) + ",p" + std::to_string(i % 4) + "\n";
  write(dir / "images.csv", images);
  REQUIRE(run({"manifest", "build", "--images", dir / "images.csv", "--sizes", "6,30,60", "--seed", "5", "--out", dir / "m.json"}).code == 0);
  REQUIRE(run({"manifest", "noise", "--in", dir / "m.json", "--p", "0.25", "--seed", "2", "--out", dir / "noisy.json"}).code == 0);
  const auto noisy = manifest_from_json(parse_json(read_file(dir / "noisy.json"), "n"));
  CHECK(noisy.noise->p == 0.25);
  const auto r = run({"manifest", "holdout", "--in", dir / "noisy.json", "--size", "30", "--fraction", "0.2", "--seed", "1"});
  REQUIRE(r.code == 0);
  const auto j = parse_json(r.out, "h");
  CHECK(j["validation"].size() == 6);
  CHECK(j["train"].size() == 24);
  CHECK(run({"manifest", "holdout", "--in", dir / "noisy.json", "--size", "31"}).code == cli::kDataError);
  CHECK(run({"manifest", "build", "--images", dir / "images.csv", "--sizes", "7", "--out", dir / "bad.json"}).code ==
        cli::kDataError);
  CHECK_FALSE(std::filesystem::exists(dir / "bad.json"));
}

TEST_CASE("exit codes and no partial outputs") {
  TempDir dir;
  CHECK(run({}).code == cli::kUsageError);
  CHECK(run({"fit", "--input", "x.csv", "--metric", "m", "--bogus", "1"}).code == cli::kUsageError);
  CHECK(run({"fit", "--input", "x.csv", "--metric", "m", "--method", "magic"}).code == cli::kUsageError);
  CHECK(run({"--version"}).code == 0);

  const auto missing = run({"fit", "--input", dir / "missing.csv", "--metric", "top1_error", "--out", dir / "f.json"});
  CHECK(missing.code == cli::kDataError);
  CHECK(missing.err.find("cannot open") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "f.json"));

  write(dir / "flat.csv", "metric,n,replicate,value\nm,10,0,0.5\nm,20,0,0.5\nm,40,0,0.5\nm,80,0,0.5\n");
  const auto flat = run({"region", "--input", dir / "flat.csv", "--metric", "m", "--out", dir / "r.json"});
  CHECK(flat.code == cli::kNumericFailure);
  CHECK_FALSE(std::filesystem::exists(dir / "r.json"));

  write(dir / "empty.csv", "metric,n,replicate,value\n");
  CHECK(run({"fit", "--input", dir / "empty.csv", "--metric", "top1_error"}).code == cli::kDataError);
  CHECK(run({"report", "--input", dir / "empty.csv", "--out", dir / "p.svg"}).code == cli::kDataError);
  CHECK_FALSE(std::filesystem::exists(dir / "p.svg"));

  write(dir / "dup.csv", "metric,n,replicate,value\nm,10,0,0.5\nm,10,0,0.4\n");
  const auto dup = run({"fit", "--input", dir / "dup.csv", "--metric", "m"});
  CHECK(dup.code == cli::kDataError);
  CHECK(dup.err.find("dup.csv:3") != std::string::npos);
}

TEST_CASE("commands are byte-reproducible apart from timestamps") {
  TempDir dir;
  const std::vector<std::string> synth{"synth", "--alpha", "-0.6", "--c", "20", "--plateau", "0.9", "--sizes",
                                       "90,180,360,720,1440,2880,5760", "--sigma", "0.05", "--seed", "3"};
  const auto s1 = run(synth), s2 = run(synth);
  CHECK(s1.out == s2.out);
  write(dir / "d.csv", s1.out);
  const std::vector<std::string> fit{"fit", "--input", dir / "d.csv", "--metric", "top1_error", "--method", "both",
                                     "--bootstrap", "50", "--seed", "1"};
  CHECK(without_timestamps(run(fit).out) == without_timestamps(run(fit).out));
  const std::vector<std::string> region{"region", "--input", dir / "d.csv", "--metric", "top1_error", "--classes", "9"};
  CHECK(run(region).out == run(region).out);
}
