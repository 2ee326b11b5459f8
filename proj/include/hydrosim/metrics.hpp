#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "hydrosim/engine.hpp"
#include "hydrosim/manifest.hpp"
#include "hydrosim/scenario.hpp"

namespace hydrosim {

struct MetricsReport {
  double fcp_ms = 0.0;
  double lcp_ms = 0.0;
  double tti_ms = 0.0;
  double tbt_ms = 0.0;
  double cls = 0.0;
  std::optional<double> fid_ms;
  std::int64_t script_bytes = 0;
  std::int64_t dead_clicks = 0;
};

struct MetricDelta {
  std::optional<double> baseline;
  std::optional<double> variant;
  std::optional<double> delta;    // variant - baseline
  std::optional<double> percent;  // absent when baseline == 0 or either side absent
};

/// Per-metric comparison; negative deltas are improvements for time/byte
/// metrics. Keyed by the report field names.
struct DeltaReport {
  std::map<std::string, MetricDelta> metrics;
};

/// Earliest paint, placeholder or content. Throws ValidationError when the
/// trace has no paints.
double compute_fcp(const SimTrace& trace);

/// Content-paint time of the designated LCP module: the tallest lcpCandidate
/// visible at scroll 0 with a content paint, falling back to the tallest
/// content-painted module in the initial viewport.
double compute_lcp(const SimTrace& trace, const PageManifest& manifest,
                   const UserScenario& scenario);

/// Earliest t >= FCP outside every task such that [t, t + quietWindow) holds
/// no task longer than the long-task threshold and never more than two
/// in-flight fetches. Always exists (virtual time extends past the trace).
double compute_tti(const SimTrace& trace, const SimConfig& config);

/// Sum over tasks starting in [FCP, TTI) of max(0, duration - threshold).
double compute_tbt(const SimTrace& trace, double tti_ms, const SimConfig& config);

/// Sum of |height - placeholderHeight| / viewportHeight over
/// placeholder->content swaps inside the viewport at swap time.
double compute_cls(const SimTrace& trace, const PageManifest& manifest,
                   const UserScenario& scenario);

struct FidAndDeadClicks {
  std::optional<double> fid_ms;
  std::int64_t dead_clicks = 0;
};

FidAndDeadClicks compute_fid_and_deadclicks(const SimTrace& trace);

/// Bytes over all started script fetches; in-flight at end counts in full.
std::int64_t compute_script_bytes(const SimTrace& trace);

MetricsReport compute_report(const SimTrace& trace, const PageManifest& manifest,
                             const UserScenario& scenario, const SimConfig& config);

DeltaReport compare_reports(const MetricsReport& baseline, const MetricsReport& variant);

/// Byte-stable JSON: sorted keys, milliseconds with 2 decimals, bytes and
/// counts as integers, cls with 5 decimals, absent values as null.
std::string report_to_json(const MetricsReport& report);

std::string delta_to_json(const DeltaReport& delta);

/// Aligned text table (metric, baseline, mrah, delta, percent).
std::string delta_to_table(const MetricsReport& baseline, const MetricsReport& variant,
                           const DeltaReport& delta);

}  // namespace hydrosim
