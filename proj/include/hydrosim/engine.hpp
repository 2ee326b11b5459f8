#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hydrosim/environment.hpp"
#include "hydrosim/manifest.hpp"
#include "hydrosim/policy.hpp"
#include "hydrosim/scenario.hpp"

namespace hydrosim {

enum class InteractionReplay { kLost, kQueued };

struct SimConfig {
  double parse_cost_ms_per_10k_bytes = 1.0;
  double long_task_threshold_ms = 50.0;
  double idle_fallback_ms = 2000.0;
  bool supports_idle_callback = true;
  double quiet_window_ms = 5000.0;
  InteractionReplay interaction_replay = InteractionReplay::kLost;
  std::int64_t suspense_placeholder_bytes = 200;
};

/// Config JSON with any subset of the SimConfig keys; unknown keys rejected.
SimConfig parse_config(const std::string& text);

// ---------------------------------------------------------------------------
// Trace records. navigationStart is 0; all times are virtual milliseconds.

struct FetchRecord {
  std::string id;  // module id, or "__runtime" for the shared runtime chunk
  std::int64_t bytes = 0;
  double request_ms = 0.0;
  double first_byte_ms = 0.0;
  double done_ms = 0.0;
};

struct TaskRecord {
  std::string label;  // "execute" | "hydrate"
  std::string module_id;  // empty for the shared runtime execute
  double start_ms = 0.0;
  double end_ms = 0.0;
};

enum class PaintKind { kPlaceholder, kContent };

struct PaintRecord {
  std::string module_id;
  double at_ms = 0.0;
  PaintKind kind = PaintKind::kContent;
};

enum class TriggerCause { kImmediate, kVisible, kIdle, kInteraction, kTimeout };

const char* to_string(TriggerCause cause);

struct HydrationRecord {
  std::string module_id;
  double trigger_ms = 0.0;
  TriggerCause trigger_cause = TriggerCause::kImmediate;
  double fetch_done_ms = 0.0;
  double task_start_ms = 0.0;
  double task_end_ms = 0.0;
};

struct InteractionRecord {
  std::string module_id;
  double click_ms = 0.0;
  std::optional<double> handled_ms;
  bool dead = false;
};

struct HtmlArrivalRecord {
  std::string module_id;
  double at_ms = 0.0;
  bool placeholder = false;
};

struct SimTrace {
  std::vector<FetchRecord> fetches;
  std::vector<TaskRecord> tasks;  // time-ordered, non-overlapping
  std::vector<PaintRecord> paints;
  std::vector<HydrationRecord> hydrations;
  std::vector<InteractionRecord> interactions;
  std::vector<HtmlArrivalRecord> html_arrivals;
  double head_arrival_ms = 0.0;
  double cpu_slowdown = 1.0;
  double end_ms = 0.0;  // scenario horizon the run used
};

// ---------------------------------------------------------------------------
// Building blocks, each usable on its own.

struct FetchRequest {
  std::string id;
  std::int64_t bytes = 0;
  double request_ms = 0.0;
};

struct FetchCompletion {
  std::string id;
  double first_byte_ms = 0.0;
  double done_ms = 0.0;
};

/// Fair-share fluid network: every request waits rtt_ms for its first byte,
/// in-flight downloads split downlink_bps equally (recomputed at every
/// start/finish boundary), at most max_connections in flight, extras queue
/// FIFO. Requests must be time-ordered.
std::vector<FetchCompletion> fetch_schedule(const std::vector<FetchRequest>& requests,
                                            const NetworkProfile& network);

struct ModuleArrival {
  std::string module_id;
  std::optional<double> placeholder_ms;  // suspense modules only
  double content_ms = 0.0;
};

struct HtmlSchedule {
  double head_ms = 0.0;
  std::vector<ModuleArrival> modules;  // document order
};

/// Streaming-HTML arrival times. The head costs rtt + headHtmlBytes/bandwidth;
/// modules then stream in document order, suspense modules contributing only
/// their placeholder bytes in-order with content injected at
/// max(in-order time, serverRenderLatencyMs + rttMs).
HtmlSchedule html_arrival_times(const PageManifest& manifest, const NetworkProfile& network,
                                std::int64_t suspense_placeholder_bytes = 200);

/// Intersection test with symmetric root margin; both bounds strict.
bool viewport_visible(std::int64_t offset_px, std::int64_t height_px, std::int64_t scroll_y_px,
                      std::int64_t viewport_height_px, std::int64_t root_margin_px);

/// Earliest t >= from_ms with no task running and none queued back-to-back:
/// from_ms when outside every busy chain, else the end of the chain.
double next_idle(const SimTrace& trace, double from_ms);

/// Runs the page load deterministically. Throws ValidationError on
/// plan/manifest mismatch or clicks on unknown module ids; InternalError if
/// the produced trace fails its self-checks.
SimTrace simulate(const PageManifest& manifest, const HydrationPlan& plan,
                  const Environment& env, const UserScenario& scenario,
                  const SimConfig& config = {});

/// Trace invariants (single main thread, hydration causality chain, ssr-only
/// emptiness, timeout exactness, one-at-a-time ordering, work conservation).
/// Returns human-readable violations; empty means the trace is sound.
std::vector<std::string> check_trace(const SimTrace& trace, const PageManifest& manifest,
                                     const HydrationPlan& plan);

/// Stable CSV export: kind,id,t_start_ms,t_end_ms,bytes sorted by
/// (t_start, kind, id). Byte-identical across runs with identical inputs.
std::string trace_to_csv(const SimTrace& trace);

}  // namespace hydrosim
