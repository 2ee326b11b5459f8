#include "hydrosim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hydrosim/errors.hpp"

namespace hydrosim {

double compute_fcp(const SimTrace& trace) {
  if (trace.paints.empty()) {
    throw ValidationError("compute_fcp: no paint");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& paint : trace.paints) best = std::min(best, paint.at_ms);
  return best;
}

double compute_lcp(const SimTrace& trace, const PageManifest& manifest,
                   const UserScenario& scenario) {
  std::optional<double> content_paint[2];  // [0]=fallback pool, [1]=flagged candidates
  std::int64_t best_height[2] = {-1, -1};
  int best_index[2] = {-1, -1};

  for (std::size_t i = 0; i < manifest.modules.size(); ++i) {
    const ModuleSpec& module = manifest.modules[i];
    if (!viewport_visible(module.offset_px, module.height_px, 0, scenario.viewport_height_px, 0)) {
      continue;
    }
    std::optional<double> paint_ms;
    for (const auto& paint : trace.paints) {
      if (paint.kind == PaintKind::kContent && paint.module_id == module.id) {
        paint_ms = paint.at_ms;
        break;
      }
    }
    if (!paint_ms) continue;
    for (int pool : {0, module.lcp_candidate ? 1 : 0}) {
      if (module.height_px > best_height[pool] ||
          (module.height_px == best_height[pool] && best_index[pool] > static_cast<int>(i))) {
        best_height[pool] = module.height_px;
        best_index[pool] = static_cast<int>(i);
        content_paint[pool] = paint_ms;
      }
    }
  }

  if (content_paint[1]) return *content_paint[1];
  if (content_paint[0]) return *content_paint[0];
  throw ValidationError("compute_lcp: no content paint in the initial viewport");
}

namespace {

struct Interval {
  double start;
  double end;
};

bool intersects(const Interval& iv, double start, double end) {
  return iv.start < end && iv.end > start;
}

// Periods with more than two fetches in flight ([request, done)).
std::vector<Interval> busy_network_intervals(const SimTrace& trace) {
  std::vector<std::pair<double, int>> edges;
  for (const auto& fetch : trace.fetches) {
    edges.push_back({fetch.request_ms, +1});
    edges.push_back({fetch.done_ms, -1});
  }
  std::sort(edges.begin(), edges.end());
  std::vector<Interval> out;
  int in_flight = 0;
  double opened = 0.0;
  for (const auto& [t, delta] : edges) {
    int before = in_flight;
    in_flight += delta;
    if (before <= 2 && in_flight > 2) {
      opened = t;
    } else if (before > 2 && in_flight <= 2) {
      if (t > opened) out.push_back({opened, t});
    }
  }
  return out;
}

}  // namespace

double compute_tti(const SimTrace& trace, const SimConfig& config) {
  double fcp = compute_fcp(trace);

  std::vector<Interval> violations;
  for (const auto& task : trace.tasks) {
    if (task.end_ms - task.start_ms > config.long_task_threshold_ms) {
      violations.push_back({task.start_ms, task.end_ms});
    }
  }
  for (const auto& iv : busy_network_intervals(trace)) violations.push_back(iv);

  std::vector<double> candidates = {fcp};
  for (const auto& v : violations) candidates.push_back(v.end);
  for (const auto& task : trace.tasks) candidates.push_back(task.end_ms);
  std::sort(candidates.begin(), candidates.end());

  for (double t : candidates) {
    if (t < fcp) continue;
    bool inside_task = false;
    for (const auto& task : trace.tasks) {
      if (task.start_ms <= t && t < task.end_ms) {
        inside_task = true;
        break;
      }
    }
    if (inside_task) continue;
    bool quiet = true;
    for (const auto& v : violations) {
      if (intersects(v, t, t + config.quiet_window_ms)) {
        quiet = false;
        break;
      }
    }
    if (quiet) return t;
  }
  // Unreachable: the instant after the last violation/task always qualifies.
  throw InternalError("compute_tti: no quiet window found");
}

double compute_tbt(const SimTrace& trace, double tti_ms, const SimConfig& config) {
  double fcp = compute_fcp(trace);
  double total = 0.0;
  for (const auto& task : trace.tasks) {
    if (task.start_ms >= fcp && task.start_ms < tti_ms) {
      total += std::max(0.0, (task.end_ms - task.start_ms) - config.long_task_threshold_ms);
    }
  }
  return total;
}

double compute_cls(const SimTrace& trace, const PageManifest& manifest,
                   const UserScenario& scenario) {
  double total = 0.0;
  for (const auto& module : manifest.modules) {
    if (!module.suspense) continue;
    bool has_placeholder = false;
    std::optional<double> swap_ms;
    for (const auto& paint : trace.paints) {
      if (paint.module_id != module.id) continue;
      if (paint.kind == PaintKind::kPlaceholder) has_placeholder = true;
      if (paint.kind == PaintKind::kContent && !swap_ms) swap_ms = paint.at_ms;
    }
    if (!has_placeholder || !swap_ms) continue;
    std::int64_t y = scroll_position_at(scenario, std::min(*swap_ms, scenario.end_ms));
    if (!viewport_visible(module.offset_px, module.height_px, y, scenario.viewport_height_px, 0)) {
      continue;
    }
    total += static_cast<double>(std::llabs(module.height_px - module.placeholder_height_px)) /
             static_cast<double>(scenario.viewport_height_px);
  }
  return total;
}

FidAndDeadClicks compute_fid_and_deadclicks(const SimTrace& trace) {
  FidAndDeadClicks out;
  std::optional<double> first_click;
  for (const auto& interaction : trace.interactions) {
    if (interaction.dead) ++out.dead_clicks;
    if (interaction.handled_ms &&
        (!first_click || interaction.click_ms < *first_click)) {
      first_click = interaction.click_ms;
      out.fid_ms = *interaction.handled_ms - interaction.click_ms;
    }
  }
  return out;
}

std::int64_t compute_script_bytes(const SimTrace& trace) {
  std::int64_t total = 0;
  for (const auto& fetch : trace.fetches) total += fetch.bytes;
  return total;
}

MetricsReport compute_report(const SimTrace& trace, const PageManifest& manifest,
                             const UserScenario& scenario, const SimConfig& config) {
  MetricsReport report;
  report.fcp_ms = compute_fcp(trace);
  report.lcp_ms = compute_lcp(trace, manifest, scenario);
  report.tti_ms = compute_tti(trace, config);
  report.tbt_ms = compute_tbt(trace, report.tti_ms, config);
  report.cls = compute_cls(trace, manifest, scenario);
  auto fid = compute_fid_and_deadclicks(trace);
  report.fid_ms = fid.fid_ms;
  report.dead_clicks = fid.dead_clicks;
  report.script_bytes = compute_script_bytes(trace);

  if (report.lcp_ms < report.fcp_ms || report.tti_ms < report.fcp_ms || report.tbt_ms < 0) {
    throw InternalError("compute_report: metric invariants violated");
  }
  return report;
}

namespace {

MetricDelta make_delta(std::optional<double> baseline, std::optional<double> variant) {
  MetricDelta delta;
  delta.baseline = baseline;
  delta.variant = variant;
  if (baseline && variant) {
    delta.delta = *variant - *baseline;
    if (*baseline != 0.0) {
      delta.percent = (*variant - *baseline) / *baseline * 100.0;
    }
  }
  return delta;
}

}  // namespace

DeltaReport compare_reports(const MetricsReport& baseline, const MetricsReport& variant) {
  DeltaReport out;
  out.metrics["fcpMs"] = make_delta(baseline.fcp_ms, variant.fcp_ms);
  out.metrics["lcpMs"] = make_delta(baseline.lcp_ms, variant.lcp_ms);
  out.metrics["ttiMs"] = make_delta(baseline.tti_ms, variant.tti_ms);
  out.metrics["tbtMs"] = make_delta(baseline.tbt_ms, variant.tbt_ms);
  out.metrics["cls"] = make_delta(baseline.cls, variant.cls);
  out.metrics["fidMs"] = make_delta(baseline.fid_ms, variant.fid_ms);
  out.metrics["scriptBytes"] = make_delta(static_cast<double>(baseline.script_bytes),
                                          static_cast<double>(variant.script_bytes));
  out.metrics["deadClicks"] = make_delta(static_cast<double>(baseline.dead_clicks),
                                         static_cast<double>(variant.dead_clicks));
  return out;
}

// ---------------------------------------------------------------------------
// Byte-stable JSON/text emission. Keys are written sorted, milliseconds with
// two decimals, bytes/counts as integers, cls with five decimals.

namespace {

std::string ms2(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

std::string fixed5(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.5f", value);
  return buffer;
}

bool is_integer_metric(const std::string& name) {
  return name == "scriptBytes" || name == "deadClicks";
}

std::string format_metric(const std::string& name, double value) {
  if (is_integer_metric(name)) return std::to_string(static_cast<std::int64_t>(value));
  if (name == "cls") return fixed5(value);
  return ms2(value);
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"cls\": " << fixed5(report.cls) << ",\n";
  out << "  \"deadClicks\": " << report.dead_clicks << ",\n";
  out << "  \"fcpMs\": " << ms2(report.fcp_ms) << ",\n";
  out << "  \"fidMs\": " << (report.fid_ms ? ms2(*report.fid_ms) : "null") << ",\n";
  out << "  \"lcpMs\": " << ms2(report.lcp_ms) << ",\n";
  out << "  \"scriptBytes\": " << report.script_bytes << ",\n";
  out << "  \"tbtMs\": " << ms2(report.tbt_ms) << ",\n";
  out << "  \"ttiMs\": " << ms2(report.tti_ms) << "\n";
  out << "}";
  return out.str();
}

std::string delta_to_json(const DeltaReport& delta) {
  std::ostringstream out;
  out << "{\n";
  bool first_metric = true;
  for (const auto& [name, d] : delta.metrics) {  // std::map iterates sorted
    if (!first_metric) out << ",\n";
    first_metric = false;
    out << "  \"" << name << "\": {";
    out << "\"baseline\": " << (d.baseline ? format_metric(name, *d.baseline) : "null") << ", ";
    out << "\"delta\": " << (d.delta ? format_metric(name, *d.delta) : "null") << ", ";
    out << "\"percent\": " << (d.percent ? ms2(*d.percent) : "null") << ", ";
    out << "\"variant\": " << (d.variant ? format_metric(name, *d.variant) : "null");
    out << "}";
  }
  out << "\n}";
  return out.str();
}

std::string delta_to_table(const MetricsReport& baseline, const MetricsReport& variant,
                           const DeltaReport& delta) {
  (void)baseline;
  (void)variant;
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %14s %14s %14s %10s\n", "metric", "baseline", "mrah",
                "delta", "percent");
  out << line;
  static const char* kOrder[] = {"fcpMs", "lcpMs",  "ttiMs",       "tbtMs",
                                 "cls",   "fidMs",  "scriptBytes", "deadClicks"};
  for (const char* name : kOrder) {
    const MetricDelta& d = delta.metrics.at(name);
    std::string b = d.baseline ? format_metric(name, *d.baseline) : "-";
    std::string v = d.variant ? format_metric(name, *d.variant) : "-";
    std::string dd = d.delta ? format_metric(name, *d.delta) : "-";
    std::string pct = d.percent ? ms2(*d.percent) + std::string("%") : "-";
    std::snprintf(line, sizeof(line), "%-12s %14s %14s %14s %10s\n", name, b.c_str(), v.c_str(),
                  dd.c_str(), pct.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace hydrosim
