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
#include "lcurve/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lcurve/error.hpp"

namespace lcurve {

namespace {

constexpr double kPanelWidth = 720.0;
constexpr double kPanelHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

constexpr const char* kFitColors[] = {"#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

enum class Phase { kSmallData, kPowerLaw, kIrreducible, kNone };

const char* phase_class(Phase p) {
  switch (p) {
    case Phase::kSmallData: return "data-line small-data";
    case Phase::kPowerLaw: return "data-line power-law";
    case Phase::kIrreducible: return "data-line irreducible";
    case Phase::kNone: return "data-line";
  }
  return "data-line";
}

const char* phase_color(Phase p) {
  switch (p) {
    case Phase::kSmallData: return "#9e9e9e";
    case Phase::kIrreducible: return "#d62728";
    default: return "#1f77b4";
  }
}

// Decade-aligned log10 axis.
struct LogAxis {
  double lo = 0.0;  // log10 of the first decade
  double hi = 1.0;

  static LogAxis covering(double min_value, double max_value) {
    LogAxis a{std::floor(std::log10(min_value)), std::ceil(std::log10(max_value))};
    if (a.hi <= a.lo) a.hi = a.lo + 1.0;
    return a;
  }
  double unit(double v) const { return (std::log10(v) - lo) / (hi - lo); }
};

struct Panel {
  double top = 0.0;
  LogAxis x, y;

  double px(double n) const { return kLeft + x.unit(n) * (kPanelWidth - kLeft - kRight); }
  double py(double v) const { return top + kTop + (1.0 - y.unit(v)) * (kPanelHeight - kTop - kBottom); }
  double y_floor() const { return std::pow(10.0, y.lo); }
};

void table_row(std::string& table, std::string_view kind, std::string_view metric, std::string_view label,
               double n, double value, double lower, double upper) {
  table += std::string(kind) + ',' + std::string(metric) + ',' + std::string(label) + ',' + format_number(n) + ',' +
           format_number(value) + ',' + format_number(lower) + ',' + format_number(upper) + '\n';
}

std::string fit_label(const FitArtifact& f) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s alpha=%.4f c=%.4g", std::string(to_string(f.fit.method)).c_str(), f.fit.alpha,
                f.fit.c);
  return buf;
}

}  // namespace

std::filesystem::path report_table_path(const std::filesystem::path& svg_path) {
  auto p = svg_path;
  p.replace_extension(".csv");
  if (p == svg_path) p += ".table.csv";
  return p;
}

Report render_report(const MeasurementLog& log, std::span<const FitArtifact> fits,
                     const std::optional<RegionArtifact>& region) {
  std::vector<const MeasurementSet*> panels;
  for (const auto& ms : log) {
    if (!ms.empty()) panels.push_back(&ms);
  }
  if (panels.empty()) throw Error(ErrorKind::kParse, "nothing to plot: the measurement set is empty");
  for (const auto& f : fits) {
    if (std::none_of(panels.begin(), panels.end(), [&](const auto* ms) { return ms->metric().name() == f.metric; }))
      throw Error(ErrorKind::kParse, "fit references metric '" + f.metric + "' which has no measurements");
  }
  if (region && std::none_of(panels.begin(), panels.end(),
                             [&](const auto* ms) { return ms->metric().name() == region->metric; }))
    throw Error(ErrorKind::kParse, "region references metric '" + region->metric + "' which has no measurements");

  const double height = kPanelHeight * static_cast<double>(panels.size());
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kPanelWidth) + "\" height=\"" + fmt(height) +
         "\" viewBox=\"0 0 " + fmt(kPanelWidth) + " " + fmt(height) + "\">\n";
  svg += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + fmt(kPanelWidth) + "\" height=\"" + fmt(height) +
         "\" fill=\"#ffffff\"/>\n";
  std::string table = "kind,metric,label,n,value,lower,upper\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const MeasurementSet& ms = *panels[pi];
    const std::string& metric = ms.metric().name();
    const auto rows = aggregate(ms);
    std::vector<const FitArtifact*> panel_fits;
    for (const auto& f : fits) {
      if (f.metric == metric) panel_fits.push_back(&f);
    }
    const RegionArtifact* panel_region = region && region->metric == metric ? &*region : nullptr;

    double n_lo = static_cast<double>(rows.front().n), n_hi = static_cast<double>(rows.back().n);
    double v_lo = std::numeric_limits<double>::infinity(), v_hi = 0.0;
    for (const auto& r : rows) {
      if (r.mean > 0.0) v_lo = std::min(v_lo, r.mean);
      if (r.mean - r.std > 0.0) v_lo = std::min(v_lo, r.mean - r.std);
      v_hi = std::max(v_hi, r.mean + r.std);
    }
    for (const auto* f : panel_fits) {
      n_lo = std::min(n_lo, static_cast<double>(f->fit.n_min));
      n_hi = std::max(n_hi, static_cast<double>(f->fit.n_max));
      for (double n : {static_cast<double>(f->fit.n_min), static_cast<double>(f->fit.n_max)}) {
        const double v = power_law(f->fit.c, f->fit.alpha, n);
        v_lo = std::min(v_lo, v);
        v_hi = std::max(v_hi, v);
      }
    }
    if (!std::isfinite(v_lo) || !(v_hi > 0.0)) {
      v_lo = 1e-3;
      v_hi = std::max(v_hi, 1.0);
    }

    Panel panel{kPanelHeight * static_cast<double>(pi), LogAxis::covering(n_lo, n_hi), LogAxis::covering(v_lo, v_hi)};
    const double x0 = kLeft, x1 = kPanelWidth - kRight;
    const double y0 = panel.top + kTop, y1 = panel.top + kPanelHeight - kBottom;

    svg += "<g class=\"panel\" data-metric=\"" + escape(metric) + "\">\n";
    svg += "<text class=\"title\" x=\"" + fmt(x0) + "\" y=\"" + fmt(panel.top + 24.0) +
           "\" font-family=\"sans-serif\" font-size=\"14\">" + escape(metric) + " vs training-set size</text>\n";
    svg += "<rect class=\"frame\" x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(x1 - x0) +
           "\" height=\"" + fmt(y1 - y0) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
    for (double d = panel.x.lo; d <= panel.x.hi; d += 1.0) {
      const double x = panel.px(std::pow(10.0, d));
      svg += "<line class=\"tick x\" x1=\"" + fmt(x) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
             fmt(y1 + 5.0) + "\" stroke=\"#333333\"/>\n";
      svg += "<text class=\"tick-label\" x=\"" + fmt(x) + "\" y=\"" + fmt(y1 + 18.0) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" + format_number(d) + "</text>\n";
    }
    for (double d = panel.y.lo; d <= panel.y.hi; d += 1.0) {
      const double y = panel.py(std::pow(10.0, d));
      svg += "<line class=\"tick y\" x1=\"" + fmt(x0 - 5.0) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(x0) + "\" y2=\"" +
             fmt(y) + "\" stroke=\"#333333\"/>\n";
      svg += "<text class=\"tick-label\" x=\"" + fmt(x0 - 8.0) + "\" y=\"" + fmt(y + 4.0) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" + format_number(d) + "</text>\n";
    }
    svg += "<text class=\"axis-label\" x=\"" + fmt((x0 + x1) / 2.0) + "\" y=\"" + fmt(y1 + 38.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">N (log scale)</text>\n";

    // +/- 1 std band: upper edge forward, lower edge back.
    std::string band;
    for (const auto& r : rows) band += fmt(panel.px(static_cast<double>(r.n))) + "," + fmt(panel.py(r.mean + r.std)) + " ";
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      const double lower = it->mean - it->std > 0.0 ? it->mean - it->std : panel.y_floor();
      band += fmt(panel.px(static_cast<double>(it->n))) + "," + fmt(panel.py(lower)) + " ";
    }
    band.pop_back();
    svg += "<polygon class=\"band\" points=\"" + band + "\" fill=\"#1f77b4\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";

    const auto phase_of = [&](uint64_t n) {
      if (!panel_region) return Phase::kNone;
      if (n < panel_region->region.n_start_power_law) return Phase::kSmallData;
      if (panel_region->region.n_end_power_law && n >= *panel_region->region.n_end_power_law) return Phase::kIrreducible;
      return Phase::kPowerLaw;
    };
    const auto point = [&](const AggregateRow& r) {
      return fmt(panel.px(static_cast<double>(r.n))) + "," + fmt(panel.py(std::max(r.mean, panel.y_floor())));
    };
    // One polyline per phase run; each run starts at the previous run's last point.
    for (std::size_t i = 0; i < rows.size();) {
      const Phase phase = phase_of(rows[i].n);
      std::size_t j = i;
      while (j < rows.size() && phase_of(rows[j].n) == phase) ++j;
      std::string pts = i > 0 ? point(rows[i - 1]) + " " : std::string();
      for (std::size_t k = i; k < j; ++k) pts += point(rows[k]) + (k + 1 < j ? " " : "");
      svg += std::string("<polyline class=\"") + phase_class(phase) + "\" points=\"" + pts + "\" fill=\"none\" stroke=\"" +
             phase_color(phase) + "\" stroke-width=\"1.5\"/>\n";
      i = j;
    }
    for (const auto& r : rows) {
      const Phase phase = phase_of(r.n);
      svg += "<circle class=\"marker\" cx=\"" + fmt(panel.px(static_cast<double>(r.n))) + "\" cy=\"" +
             fmt(panel.py(std::max(r.mean, panel.y_floor()))) + "\" r=\"3\" fill=\"" + phase_color(phase) + "\"/>\n";
      table_row(table, "mean", metric, std::to_string(r.count) + " replicates", static_cast<double>(r.n), r.mean,
                r.mean - r.std, r.mean + r.std);
    }
    if (panel_region) {
      const auto n0 = static_cast<double>(panel_region->region.n_start_power_law);
      table_row(table, "region_start", metric, "", n0, 0.0, 0.0, 0.0);
      if (panel_region->region.n_end_power_law) {
        table_row(table, "region_end", metric, "", static_cast<double>(*panel_region->region.n_end_power_law), 0.0, 0.0,
                  0.0);
      }
    }

    for (std::size_t fi = 0; fi < panel_fits.size(); ++fi) {
      const auto& f = *panel_fits[fi];
      const char* color = kFitColors[fi % std::size(kFitColors)];
      const auto a = static_cast<double>(f.fit.n_min), b = static_cast<double>(f.fit.n_max);
      const double va = power_law(f.fit.c, f.fit.alpha, a), vb = power_law(f.fit.c, f.fit.alpha, b);
      svg += "<path class=\"fit\" d=\"M " + fmt(panel.px(a)) + " " + fmt(panel.py(va)) + " L " + fmt(panel.px(b)) + " " +
             fmt(panel.py(vb)) + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" stroke-dasharray=\"2 4\"/>\n";
      svg += "<text class=\"legend\" x=\"" + fmt(x1 - 8.0) + "\" y=\"" + fmt(y0 + 16.0 + 14.0 * static_cast<double>(fi)) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + color + "\">" +
             escape(fit_label(f)) + "</text>\n";
      table_row(table, "fit", metric, fit_label(f), a, va, va, va);
      table_row(table, "fit", metric, fit_label(f), b, vb, vb, vb);
    }

    for (std::size_t i = 0; i < panel_fits.size(); ++i) {
      for (std::size_t j = i + 1; j < panel_fits.size(); ++j) {
        Intersection x;
        try {
          x = predict_intersection(panel_fits[i]->fit, panel_fits[j]->fit);
        } catch (const Error&) {
          continue;
        }
        if (!(x.n_star >= std::pow(10.0, panel.x.lo) && x.n_star <= std::pow(10.0, panel.x.hi))) continue;
        const double v = power_law(panel_fits[i]->fit.c, panel_fits[i]->fit.alpha, x.n_star);
        if (!(v >= panel.y_floor() && v <= std::pow(10.0, panel.y.hi))) continue;
        svg += "<circle class=\"intersection\" cx=\"" + fmt(panel.px(x.n_star)) + "\" cy=\"" + fmt(panel.py(v)) +
               "\" r=\"5\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
        table_row(table, "intersection", metric, x.superior_beyond == Side::kA ? "a" : "b", x.n_star, v, v, v);
      }
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return {std::move(svg), std::move(table)};
}

void write_report(const MeasurementLog& log, std::span<const FitArtifact> fits,
                  const std::optional<RegionArtifact>& region, const std::filesystem::path& path) {
  const Report report = render_report(log, fits, region);
  const auto table_path = report_table_path(path);
  write_file_atomic(path, report.svg);
  try {
    write_file_atomic(table_path, report.table);
  } catch (...) {
    std::filesystem::remove(path);
    throw;
  }
}

}  // namespace lcurve
