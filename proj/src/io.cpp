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
#include "lcurve/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "lcurve/error.hpp"

namespace lcurve {

using nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(begin));
      return out;
    }
    out.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

// Lines with their 1-based numbers; a trailing '\r' is dropped.
std::vector<std::pair<std::size_t, std::string_view>> split_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t number = 0;
  std::size_t begin = 0;
  while (begin < text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(++number, line);
    begin = end + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::string_view source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw Error(ErrorKind::kParse, os.str());
}

template <typename T>
bool parse_integer(std::string_view s, T& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename Fn>
auto json_guard(std::string_view what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string(what) + ": " + e.what());
  }
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(ErrorKind::kIo, "cannot format number");
  return std::string(buf, ptr);
}

MeasurementLog parse_measurements(std::string_view text, std::string_view source) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front().second != kMeasurementHeader) {
    parse_error(source, 1, "expected header '" + std::string(kMeasurementHeader) + "'");
  }
  struct Pending {
    Metric metric;
    std::vector<MeasurementPoint> points;
  };
  std::vector<Pending> pending;
  std::map<std::string, std::size_t, std::less<>> metric_index;
  std::map<std::tuple<std::string, uint64_t, int64_t>, std::size_t> first_seen;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [number, line] = lines[i];
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      parse_error(source, number, "expected 4 columns (" + std::string(kMeasurementHeader) + "), found " +
                                      std::to_string(fields.size()));
    }
    if (fields[0].empty()) parse_error(source, number, "empty metric name");
    MeasurementPoint p;
    if (!parse_integer(fields[1], p.n) || p.n < 1)
      parse_error(source, number, "n must be a positive integer, got '" + std::string(fields[1]) + "'");
    if (!parse_integer(fields[2], p.replicate) || p.replicate < 0)
      parse_error(source, number, "replicate must be a non-negative integer, got '" + std::string(fields[2]) + "'");
    if (!parse_double(fields[3], p.value) || !std::isfinite(p.value) || p.value < 0.0)
      parse_error(source, number, "value must be a finite non-negative number, got '" + std::string(fields[3]) + "'");

    const std::string metric(fields[0]);
    const auto [it, inserted] = first_seen.try_emplace({metric, p.n, p.replicate}, number);
    if (!inserted) {
      std::ostringstream os;
      os << "duplicate (metric=" << metric << ", n=" << p.n << ", replicate=" << p.replicate
         << "), first seen on line " << it->second;
      parse_error(source, number, os.str());
    }
    auto mi = metric_index.find(metric);
    if (mi == metric_index.end()) {
      mi = metric_index.emplace(metric, pending.size()).first;
      pending.push_back({Metric::from_name(metric), {}});
    }
    pending[mi->second].points.push_back(p);
  }

  MeasurementLog log;
  for (auto& p : pending) log.emplace_back(std::move(p.metric), std::move(p.points));
  return log;
}

MeasurementLog read_measurements(const std::filesystem::path& path) {
  return parse_measurements(read_file(path), path.string());
}

std::string format_measurements(const MeasurementLog& log) {
  std::string out(kMeasurementHeader);
  out += '\n';
  for (const auto& ms : log) {
    for (const auto& p : ms.points()) {
      out += ms.metric().name();
      out += ',';
      out += std::to_string(p.n);
      out += ',';
      out += std::to_string(p.replicate);
      out += ',';
      out += format_number(p.value);
      out += '\n';
    }
  }
  return out;
}

const MeasurementSet& select_metric(const MeasurementLog& log, std::string_view metric) {
  for (const auto& ms : log) {
    if (ms.metric().name() == metric) return ms;
  }
  throw Error(ErrorKind::kParse, "no measurements for metric '" + std::string(metric) + "'");
}

std::vector<ImageEntry> parse_images(std::string_view text, std::string_view source) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front().second != kImagesHeader) {
    parse_error(source, 1, "expected header '" + std::string(kImagesHeader) + "'");
  }
  std::vector<ImageEntry> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [number, line] = lines[i];
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      parse_error(source, number, "expected 3 columns (" + std::string(kImagesHeader) + "), found " +
                                      std::to_string(fields.size()));
    }
    if (fields[0].empty()) parse_error(source, number, "empty image_id");
    if (fields[1].empty()) parse_error(source, number, "empty class");
    out.push_back({std::string(fields[0]), std::string(fields[1]), std::string(fields[2])});
  }
  return out;
}

std::vector<ImageEntry> read_images(const std::filesystem::path& path) {
  return parse_images(read_file(path), path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error(ErrorKind::kIo, "short write to " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::kIo, "cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

std::string content_digest(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::kIo, "sha256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

std::string current_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr) {
    long long v = 0;
    if (parse_integer(std::string_view(epoch), v)) t = static_cast<std::time_t>(v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json to_json(const PowerLawFit& fit) {
  ordered_json j;
  j["alpha"] = fit.alpha;
  j["c"] = fit.c;
  j["method"] = std::string(to_string(fit.method));
  j["n_range"] = {fit.n_min, fit.n_max};
  j["rss"] = fit.rss;
  j["r_squared"] = optional_json(fit.r_squared);
  if (fit.ci_alpha) {
    j["ci_alpha"] = {{"lower", fit.ci_alpha->lower},
                     {"upper", fit.ci_alpha->upper},
                     {"confidence", fit.ci_alpha->confidence}};
  } else {
    j["ci_alpha"] = nullptr;
  }
  j["on_means"] = fit.on_means;
  j["points_used"] = fit.points_used;
  j["iterations"] = fit.iterations;
  return j;
}

PowerLawFit fit_from_json(const ordered_json& j) {
  return json_guard("fit", [&] {
    PowerLawFit fit;
    fit.alpha = j.at("alpha").get<double>();
    fit.c = j.at("c").get<double>();
    fit.method = fit_method_from_string(j.at("method").get<std::string>());
    fit.n_min = j.at("n_range").at(0).get<uint64_t>();
    fit.n_max = j.at("n_range").at(1).get<uint64_t>();
    fit.rss = j.at("rss").get<double>();
    fit.r_squared = optional_from<double>(j, "r_squared");
    if (j.contains("ci_alpha") && !j.at("ci_alpha").is_null()) {
      const auto& ci = j.at("ci_alpha");
      fit.ci_alpha = Interval{ci.at("lower").get<double>(), ci.at("upper").get<double>(),
                              ci.at("confidence").get<double>()};
    }
    fit.on_means = j.value("on_means", true);
    fit.points_used = j.value("points_used", std::size_t{0});
    fit.iterations = j.value("iterations", 0);
    if (!(fit.c > 0.0)) throw Error(ErrorKind::kParse, "fit: c must be positive");
    return fit;
  });
}

ordered_json to_json(const FitArtifact& a) {
  ordered_json j;
  j["tool"] = "lcurve";
  j["tool_version"] = a.tool_version;
  j["metric"] = a.metric;
  j["input_digest"] = a.input_digest;
  ordered_json params;
  params["n_min"] = a.params.n_min;
  params["n_max"] = optional_json(a.params.n_max);
  params["method"] = std::string(to_string(a.params.method));
  params["on_means"] = a.params.on_means;
  params["seed"] = optional_json(a.params.seed);
  params["draws"] = optional_json(a.params.draws);
  params["confidence"] = optional_json(a.params.confidence);
  j["params"] = params;
  j["fit"] = to_json(a.fit);
  j["timestamp"] = a.timestamp;
  return j;
}

FitArtifact fit_artifact_from_json(const ordered_json& j) {
  return json_guard("fit artifact", [&] {
    FitArtifact a;
    a.metric = j.at("metric").get<std::string>();
    a.input_digest = j.value("input_digest", std::string());
    a.tool_version = j.value("tool_version", std::string());
    a.timestamp = j.value("timestamp", std::string());
    const auto& p = j.at("params");
    a.params.n_min = p.at("n_min").get<uint64_t>();
    a.params.n_max = optional_from<uint64_t>(p, "n_max");
    a.params.method = fit_method_from_string(p.at("method").get<std::string>());
    a.params.on_means = p.at("on_means").get<bool>();
    a.params.seed = optional_from<uint64_t>(p, "seed");
    a.params.draws = optional_from<int>(p, "draws");
    a.params.confidence = optional_from<double>(p, "confidence");
    a.fit = fit_from_json(j.at("fit"));
    return a;
  });
}

FitArtifact load_fit_artifact(const std::filesystem::path& path, std::optional<FitMethod> method) {
  const auto j = parse_json(read_file(path), path.string());
  if (!j.contains("artifacts")) return fit_artifact_from_json(j);
  return json_guard(path.string(), [&] {
    if (!method) {
      throw Error(ErrorKind::kParse,
                  path.string() + " holds several fits; choose one with --method loglog|nonlinear");
    }
    for (const auto& item : j.at("artifacts")) {
      auto a = fit_artifact_from_json(item);
      if (a.fit.method == *method) return a;
    }
    throw Error(ErrorKind::kParse, path.string() + " has no " + std::string(to_string(*method)) + " fit");
  });
}

ordered_json to_json(const RegionArtifact& a) {
  ordered_json j;
  j["tool"] = "lcurve";
  j["tool_version"] = a.tool_version;
  j["metric"] = a.metric;
  j["input_digest"] = a.input_digest;
  j["plateau"] = optional_json(a.plateau);
  j["r2_threshold"] = a.r2_threshold;
  j["n_start_power_law"] = a.region.n_start_power_law;
  j["n_end_power_law"] = optional_json(a.region.n_end_power_law);
  j["alpha"] = a.region.alpha;
  ordered_json diag = ordered_json::array();
  for (const auto& d : a.region.diagnostics) {
    diag.push_back({{"n", d.n},
                    {"r_squared", optional_json(d.r_squared)},
                    {"alpha", d.alpha},
                    {"mean", d.mean},
                    {"below_plateau", d.below_plateau}});
  }
  j["diagnostics"] = diag;
  return j;
}

RegionArtifact region_artifact_from_json(const ordered_json& j) {
  return json_guard("region", [&] {
    RegionArtifact a;
    a.metric = j.at("metric").get<std::string>();
    a.input_digest = j.value("input_digest", std::string());
    a.tool_version = j.value("tool_version", std::string());
    a.plateau = optional_from<double>(j, "plateau");
    a.r2_threshold = j.value("r2_threshold", 0.98);
    a.region.n_start_power_law = j.at("n_start_power_law").get<uint64_t>();
    a.region.n_end_power_law = optional_from<uint64_t>(j, "n_end_power_law");
    a.region.alpha = j.value("alpha", 0.0);
    if (j.contains("diagnostics")) {
      for (const auto& d : j.at("diagnostics")) {
        a.region.diagnostics.push_back({d.at("n").get<uint64_t>(), optional_from<double>(d, "r_squared"),
                                        d.at("alpha").get<double>(), d.at("mean").get<double>(),
                                        d.at("below_plateau").get<bool>()});
      }
    }
    return a;
  });
}

ordered_json to_json(const NoiseImpactReport& report) {
  ordered_json j;
  j["delta_alpha"] = report.delta_alpha;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"target", r.target}, {"n_clean", r.n_clean}, {"n_noisy", r.n_noisy}, {"multiplier", r.multiplier}});
  }
  j["multipliers"] = rows;
  return j;
}

ordered_json to_json(const Intersection& x) {
  return {{"n_star", x.n_star},
          {"crossover_size", x.crossover_size},
          {"superior_beyond", x.superior_beyond == Side::kA ? "a" : "b"}};
}

ordered_json to_json(const HoldoutSplit& split, uint64_t size, double fraction, uint64_t seed) {
  return {{"size", size}, {"fraction", fraction}, {"seed", seed}, {"train", split.train}, {"validation", split.validation}};
}

ordered_json to_json(const SubsetManifest& m) {
  ordered_json j;
  j["classes"] = m.classes;
  j["per_class_pool"] = m.per_class_pool;
  j["sizes"] = m.sizes;
  j["seed"] = m.seed;
  j["noise"] = m.noise ? ordered_json{{"p", m.noise->p}, {"seed", m.noise->seed}} : ordered_json(nullptr);
  ordered_json diag = ordered_json::array();
  for (const auto& d : m.diagnostics) {
    diag.push_back({{"class", d.class_name}, {"groups", d.groups}, {"adjacent_same_group", d.adjacent_same_group}});
  }
  j["diagnostics"] = diag;
  ordered_json records = ordered_json::array();
  for (const auto& r : m.records) {
    records.push_back({{"image_id", r.image_id},
                       {"true_label", r.true_label},
                       {"assigned_label", r.assigned_label},
                       {"noise_flag", r.noise_flag},
                       {"class_rank", r.class_rank},
                       {"capture_group", r.capture_group}});
  }
  j["records"] = records;
  return j;
}

SubsetManifest manifest_from_json(const ordered_json& j) {
  auto m = json_guard("manifest", [&] {
    SubsetManifest m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.per_class_pool = j.at("per_class_pool").get<uint64_t>();
    m.sizes = j.at("sizes").get<std::vector<uint64_t>>();
    m.seed = j.at("seed").get<uint64_t>();
    if (j.contains("noise") && !j.at("noise").is_null()) {
      m.noise = NoiseSettings{j.at("noise").at("p").get<double>(), j.at("noise").at("seed").get<uint64_t>()};
    }
    if (j.contains("diagnostics")) {
      for (const auto& d : j.at("diagnostics")) {
        m.diagnostics.push_back({d.at("class").get<std::string>(), d.at("groups").get<uint64_t>(),
                                 d.at("adjacent_same_group").get<uint64_t>()});
      }
    }
    for (const auto& r : j.at("records")) {
      m.records.push_back({r.at("image_id").get<std::string>(), r.at("true_label").get<std::string>(),
                           r.at("assigned_label").get<std::string>(), r.at("noise_flag").get<bool>(),
                           r.at("class_rank").get<uint64_t>(), r.value("capture_group", std::string())});
    }
    return m;
  });
  m.validate();
  return m;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json parse_json(std::string_view text, std::string_view source) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string(source) + ": " + e.what());
  }
}

}  // namespace lcurve
