#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hydrosim {

enum class TriggerKind { kImmediate, kVisible, kIdle, kInteraction, kSsrOnly };

const char* to_string(TriggerKind kind);
std::optional<TriggerKind> trigger_kind_from_string(const std::string& text);

enum class Priority { kHigh = 0, kMedium = 1, kLow = 2 };

const char* to_string(Priority priority);
std::optional<Priority> priority_from_string(const std::string& text);

/// Hydration trigger rule. root_margin_px is meaningful (and required)
/// exactly when kind == kVisible.
struct TriggerRule {
  TriggerKind kind = TriggerKind::kImmediate;
  std::optional<std::int64_t> root_margin_px;

  friend bool operator==(const TriggerRule&, const TriggerRule&) = default;
};

/// One renderable/hydratable page module: payload sizes, main-thread costs,
/// document geometry and the trigger rules for both device classes.
struct ModuleSpec {
  std::string id;
  Priority priority = Priority::kMedium;
  std::int64_t chunk_bytes = 0;
  double hydration_cost_ms = 0.0;  // at 1x CPU
  std::int64_t html_bytes = 0;
  double server_render_latency_ms = 0.0;
  bool suspense = false;
  std::int64_t offset_px = 0;
  std::int64_t height_px = 0;
  std::int64_t placeholder_height_px = 0;
  bool interactive = false;
  bool lcp_candidate = false;
  TriggerRule trigger_high_end;
  TriggerRule trigger_low_end;  // defaults to trigger_high_end when absent
  std::optional<double> timeout_high_end_ms;
  std::optional<double> timeout_low_end_ms;

  friend bool operator==(const ModuleSpec&, const ModuleSpec&) = default;
};

struct PageManifest {
  std::vector<ModuleSpec> modules;  // document order
  std::int64_t shared_runtime_bytes = 0;
  std::int64_t head_html_bytes = 0;

  const ModuleSpec* find_module(const std::string& id) const;
  int module_index(const std::string& id) const;  // -1 if unknown

  friend bool operator==(const PageManifest&, const PageManifest&) = default;
};

/// One invariant violation, addressable by module id and field name.
struct Violation {
  std::string module_id;  // empty for manifest-level violations
  std::string field;
  std::string message;
};

/// Parses the manifest JSON. Applies defaulting (triggerLowEnd :=
/// trigger when absent) and throws ParseError / ValidationError on any
/// syntax error, unknown key, duplicate id or invariant violation.
PageManifest parse_manifest(const std::string& text);

/// Canonical JSON for a manifest; parse_manifest(serialize_manifest(m)) == m
/// for every valid manifest.
std::string serialize_manifest(const PageManifest& manifest);

/// Pure invariant check; returns every violation (empty means valid).
std::vector<Violation> validate_manifest(const PageManifest& manifest);

/// The eager single-bundle variant: geometry, HTML and costs untouched,
/// every trigger immediate, timeouts dropped, all chunk bytes coalesced
/// into the shared runtime. Idempotent.
PageManifest baseline_transform(const PageManifest& manifest);

}  // namespace hydrosim
