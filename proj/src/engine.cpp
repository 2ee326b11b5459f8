#include "hydrosim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "hydrosim/errors.hpp"
#include "json_detail.hpp"

namespace hydrosim {

using detail::Json;

const char* to_string(TriggerCause cause) {
  switch (cause) {
    case TriggerCause::kImmediate: return "immediate";
    case TriggerCause::kVisible: return "visible";
    case TriggerCause::kIdle: return "idle";
    case TriggerCause::kInteraction: return "interaction";
    case TriggerCause::kTimeout: return "timeout";
  }
  return "?";
}

SimConfig parse_config(const std::string& text) {
  Json root = detail::parse_json(text, "config");
  if (!root.is_object()) {
    throw ParseError("config: expected a JSON object");
  }
  detail::reject_unknown_keys(root,
                              {"parseCostMsPer10KBytes", "longTaskThresholdMs", "idleFallbackMs",
                               "supportsIdleCallback", "quietWindowMs", "interactionReplay",
                               "suspensePlaceholderBytes", "hydrationGap"},
                              "config");
  SimConfig config;
  if (root.contains("parseCostMsPer10KBytes")) {
    config.parse_cost_ms_per_10k_bytes =
        detail::as_number(root["parseCostMsPer10KBytes"], "config.parseCostMsPer10KBytes");
  }
  if (root.contains("longTaskThresholdMs")) {
    config.long_task_threshold_ms =
        detail::as_number(root["longTaskThresholdMs"], "config.longTaskThresholdMs");
  }
  if (root.contains("idleFallbackMs")) {
    config.idle_fallback_ms = detail::as_number(root["idleFallbackMs"], "config.idleFallbackMs");
  }
  if (root.contains("supportsIdleCallback")) {
    config.supports_idle_callback =
        detail::as_bool(root["supportsIdleCallback"], "config.supportsIdleCallback");
  }
  if (root.contains("quietWindowMs")) {
    config.quiet_window_ms = detail::as_number(root["quietWindowMs"], "config.quietWindowMs");
  }
  if (root.contains("interactionReplay")) {
    std::string replay = detail::as_string(root["interactionReplay"], "config.interactionReplay");
    if (replay == "lost") {
      config.interaction_replay = InteractionReplay::kLost;
    } else if (replay == "queued") {
      config.interaction_replay = InteractionReplay::kQueued;
    } else {
      throw ParseError("config.interactionReplay: expected \"lost\" or \"queued\"");
    }
  }
  if (root.contains("suspensePlaceholderBytes")) {
    config.suspense_placeholder_bytes =
        detail::as_int(root["suspensePlaceholderBytes"], "config.suspensePlaceholderBytes");
  }
  if (root.contains("hydrationGap")) {
    std::string gap = detail::as_string(root["hydrationGap"], "config.hydrationGap");
    if (gap != "next-idle") {
      throw ParseError("config.hydrationGap: the only supported value is \"next-idle\"");
    }
  }
  if (config.parse_cost_ms_per_10k_bytes < 0 || config.long_task_threshold_ms < 0 ||
      config.idle_fallback_ms < 0 || config.quiet_window_ms < 0 ||
      config.suspense_placeholder_bytes < 0) {
    throw ValidationError("config invalid: durations and sizes must be >= 0");
  }
  return config;
}

bool viewport_visible(std::int64_t offset_px, std::int64_t height_px, std::int64_t scroll_y_px,
                      std::int64_t viewport_height_px, std::int64_t root_margin_px) {
  return offset_px < scroll_y_px + viewport_height_px + root_margin_px &&
         offset_px + height_px > scroll_y_px - root_margin_px;
}

// ---------------------------------------------------------------------------
// Fair-share fluid network.

namespace {

constexpr double kBytesEpsilon = 1e-6;

class NetworkSim {
 public:
  struct Record {
    std::string id;
    std::int64_t bytes = 0;
    double request_ms = 0.0;
    double first_byte_ms = -1.0;
    double done_ms = -1.0;
  };

  explicit NetworkSim(const NetworkProfile& net)
      : rtt_ms_(net.rtt_ms),
        bytes_per_ms_(net.bytes_per_ms()),
        max_connections_(net.max_connections) {}

  int submit(std::string id, std::int64_t bytes, double request_ms) {
    int idx = static_cast<int>(records_.size());
    records_.push_back({std::move(id), bytes, request_ms, -1.0, -1.0});
    now_ = std::max(now_, request_ms);
    if (static_cast<int>(waiting_.size() + downloading_.size()) < max_connections_) {
      start_connection(idx, request_ms);
    } else {
      queue_.push_back(idx);
    }
    return idx;
  }

  // Earliest pending boundary (first byte or completion), if any.
  std::optional<double> next_event_time() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : waiting_) best = std::min(best, w.first_byte_at);
    if (!downloading_.empty()) {
      double share = bytes_per_ms_ / static_cast<double>(downloading_.size());
      for (const auto& d : downloading_) {
        best = std::min(best, now_ + d.remaining / share);
      }
    }
    if (std::isinf(best)) return std::nullopt;
    return best;
  }

  // Advances to t (no boundary may lie strictly before t) and returns the
  // indices of requests completed exactly at t, in submission order.
  std::vector<int> step_to(double t) {
    advance_download(t);
    std::vector<int> completed;
    for (auto it = downloading_.begin(); it != downloading_.end();) {
      if (it->remaining <= kBytesEpsilon) {
        records_[it->idx].done_ms = t;
        completed.push_back(it->idx);
        it = downloading_.erase(it);
      } else {
        ++it;
      }
    }
    for (auto it = waiting_.begin(); it != waiting_.end();) {
      if (it->first_byte_at <= t + 1e-12) {
        records_[it->idx].first_byte_ms = it->first_byte_at;
        downloading_.push_back({it->idx, static_cast<double>(records_[it->idx].bytes)});
        it = waiting_.erase(it);
      } else {
        ++it;
      }
    }
    while (!queue_.empty() &&
           static_cast<int>(waiting_.size() + downloading_.size()) < max_connections_) {
      int idx = queue_.front();
      queue_.pop_front();
      start_connection(idx, t);
    }
    std::sort(completed.begin(), completed.end());
    return completed;
  }

  bool active() const { return !waiting_.empty() || !downloading_.empty() || !queue_.empty(); }

  const std::vector<Record>& records() const { return records_; }

 private:
  struct Waiting {
    int idx;
    double first_byte_at;
  };
  struct Downloading {
    int idx;
    double remaining;
  };

  void start_connection(int idx, double t) {
    waiting_.push_back({idx, t + rtt_ms_});
  }

  void advance_download(double t) {
    if (t <= now_) {
      now_ = std::max(now_, t);
      return;
    }
    if (!downloading_.empty()) {
      double share = bytes_per_ms_ / static_cast<double>(downloading_.size());
      double dt = t - now_;
      for (auto& d : downloading_) d.remaining -= share * dt;
    }
    now_ = t;
  }

  double rtt_ms_;
  double bytes_per_ms_;
  int max_connections_;
  double now_ = 0.0;
  std::vector<Waiting> waiting_;
  std::vector<Downloading> downloading_;
  std::deque<int> queue_;
  std::vector<Record> records_;
};

}  // namespace

std::vector<FetchCompletion> fetch_schedule(const std::vector<FetchRequest>& requests,
                                            const NetworkProfile& network) {
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (requests[i].bytes <= 0) {
      throw ValidationError("fetch_schedule: bytes must be > 0 (request " + requests[i].id + ")");
    }
    if (i > 0 && requests[i].request_ms < requests[i - 1].request_ms) {
      throw ValidationError("fetch_schedule: requests must be time-ordered");
    }
  }

  NetworkSim sim(network);
  std::size_t next = 0;
  while (next < requests.size() || sim.active()) {
    double t_request = next < requests.size() ? requests[next].request_ms
                                              : std::numeric_limits<double>::infinity();
    auto boundary = sim.next_event_time();
    double t_net = boundary ? *boundary : std::numeric_limits<double>::infinity();
    if (t_request <= t_net) {
      sim.submit(requests[next].id, requests[next].bytes, requests[next].request_ms);
      ++next;
    } else {
      sim.step_to(t_net);
    }
  }

  std::vector<FetchCompletion> out;
  out.reserve(sim.records().size());
  for (const auto& record : sim.records()) {
    out.push_back({record.id, record.first_byte_ms, record.done_ms});
  }
  return out;
}

HtmlSchedule html_arrival_times(const PageManifest& manifest, const NetworkProfile& network,
                                std::int64_t suspense_placeholder_bytes) {
  const double bpm = network.bytes_per_ms();
  HtmlSchedule schedule;
  schedule.head_ms = network.rtt_ms + static_cast<double>(manifest.head_html_bytes) / bpm;
  double cursor = schedule.head_ms;
  for (const auto& module : manifest.modules) {
    ModuleArrival arrival;
    arrival.module_id = module.id;
    if (module.suspense) {
      cursor += static_cast<double>(suspense_placeholder_bytes) / bpm;
      arrival.placeholder_ms = cursor;
      arrival.content_ms = std::max(cursor, module.server_render_latency_ms + network.rtt_ms);
    } else {
      cursor += static_cast<double>(module.html_bytes) / bpm;
      arrival.content_ms = cursor;
    }
    schedule.modules.push_back(std::move(arrival));
  }
  return schedule;
}

// ---------------------------------------------------------------------------
// Busy-interval helpers shared by next_idle, paint commits and click handling.

namespace {

struct Interval {
  double start;
  double end;
};

std::vector<Interval> merged_busy(const std::vector<TaskRecord>& tasks) {
  std::vector<Interval> intervals;
  intervals.reserve(tasks.size());
  for (const auto& task : tasks) {
    if (task.end_ms > task.start_ms) intervals.push_back({task.start_ms, task.end_ms});
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  std::vector<Interval> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, iv.end);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

double first_free(const std::vector<Interval>& busy, double t) {
  for (const auto& iv : busy) {
    if (t < iv.start) return t;
    if (t < iv.end) return iv.end;
  }
  return t;
}

}  // namespace

double next_idle(const SimTrace& trace, double from_ms) {
  return first_free(merged_busy(trace.tasks), from_ms);
}

// ---------------------------------------------------------------------------
// The discrete-event page-load simulation.

namespace {

constexpr int kRuntimeIndex = -1;

struct ModuleState {
  const ModuleSpec* spec = nullptr;
  const ModulePlan* plan = nullptr;

  double content_arrival_ms = 0.0;
  std::optional<double> placeholder_arrival_ms;
  bool visible_pending = false;  // visible trigger armed and not yet fired

  bool trigger_fired = false;
  double trigger_ms = 0.0;
  TriggerCause trigger_cause = TriggerCause::kImmediate;

  bool fetch_started = false;
  bool fetch_done = false;
  double fetch_done_ms = 0.0;
  int fetch_handle = -1;

  bool exec_enqueued = false;
  bool exec_done = false;
  double exec_done_ms = 0.0;

  bool hydration_queued = false;
  bool hydrated = false;
  double hydration_end_ms = 0.0;
};

enum class EventKind {
  kTaskEnd = 0,
  kHeadArrival = 1,
  kHtmlArrival = 2,
  kScroll = 3,
  kClick = 4,
  kNetwork = 5,
  kTimeout = 6,
  kIdleFallback = 7,
};

struct Event {
  double t;
  EventKind kind;
  long long seq;
  int module = -2;       // module index for arrivals/timeouts/idle-fallback
  bool placeholder = false;
  std::int64_t scroll_y = 0;
  int interaction = -1;  // index into trace.interactions for clicks
  long long version = 0; // network event freshness
};

struct EventOrder {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    return a.seq > b.seq;
  }
};

struct ReadyExecute {
  double ready_ms;
  int module;  // kRuntimeIndex for the shared runtime
  double duration_ms;
};

struct ReadyHydration {
  double ready_ms;
  int priority_rank;
  int module;
};

class Simulation {
 public:
  Simulation(const PageManifest& manifest, const HydrationPlan& plan, const Environment& env,
             const UserScenario& scenario, const SimConfig& config)
      : manifest_(manifest),
        plan_(plan),
        env_(env),
        scenario_(scenario),
        config_(config),
        network_(env.network) {}

  SimTrace run() {
    validate_inputs();
    prepare();
    loop();
    return finalize();
  }

 private:
  void validate_inputs() {
    if (plan_.plans.size() != manifest_.modules.size()) {
      throw ValidationError("simulate: plan does not match manifest (module count differs)");
    }
    for (std::size_t i = 0; i < manifest_.modules.size(); ++i) {
      if (plan_.plans[i].module_id != manifest_.modules[i].id) {
        throw ValidationError("simulate: plan does not match manifest (module \"" +
                              plan_.plans[i].module_id + "\" vs \"" + manifest_.modules[i].id +
                              "\")");
      }
    }
    for (const auto& event : scenario_.events) {
      if (event.kind == UserEvent::Kind::kClick &&
          manifest_.module_index(event.module_id) < 0) {
        throw ValidationError("simulate: click on unknown module id \"" + event.module_id + "\"");
      }
    }
  }

  void prepare() {
    html_ = html_arrival_times(manifest_, env_.network, config_.suspense_placeholder_bytes);
    trace_.head_arrival_ms = html_.head_ms;
    trace_.cpu_slowdown = env_.device.cpu_slowdown;
    trace_.end_ms = scenario_.end_ms;

    modules_.resize(manifest_.modules.size());
    for (std::size_t i = 0; i < manifest_.modules.size(); ++i) {
      ModuleState& ms = modules_[i];
      ms.spec = &manifest_.modules[i];
      ms.plan = &plan_.plans[i];
      ms.content_arrival_ms = html_.modules[i].content_ms;
      ms.placeholder_arrival_ms = html_.modules[i].placeholder_ms;
      ms.visible_pending = ms.plan->trigger.kind == TriggerKind::kVisible;
    }

    push({html_.head_ms, EventKind::kHeadArrival, next_seq()});
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      if (modules_[i].placeholder_arrival_ms) {
        Event e{*modules_[i].placeholder_arrival_ms, EventKind::kHtmlArrival, next_seq()};
        e.module = static_cast<int>(i);
        e.placeholder = true;
        push(e);
      }
      Event e{modules_[i].content_arrival_ms, EventKind::kHtmlArrival, next_seq()};
      e.module = static_cast<int>(i);
      push(e);
    }
    for (const auto& event : scenario_.events) {
      if (event.kind == UserEvent::Kind::kScrollTo) {
        Event e{event.at_ms, EventKind::kScroll, next_seq()};
        e.scroll_y = event.scroll_y_px;
        push(e);
      } else {
        Event e{event.at_ms, EventKind::kClick, next_seq()};
        e.module = manifest_.module_index(event.module_id);
        push(e);
      }
    }
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      const ModulePlan& mp = *modules_[i].plan;
      if (mp.timeout_ms && *mp.timeout_ms <= scenario_.end_ms &&
          mp.trigger.kind != TriggerKind::kSsrOnly) {
        Event e{*mp.timeout_ms, EventKind::kTimeout, next_seq()};
        e.module = static_cast<int>(i);
        push(e);
      }
    }
  }

  void loop() {
    while (!heap_.empty()) {
      double t = heap_.top().t;
      while (!heap_.empty() && heap_.top().t == t) {
        Event event = heap_.top();
        heap_.pop();
        apply(event);
      }
      dispatch(t);
    }
  }

  void apply(const Event& event) {
    switch (event.kind) {
      case EventKind::kTaskEnd: on_task_end(event.t); break;
      case EventKind::kHeadArrival: on_head_arrival(event.t); break;
      case EventKind::kHtmlArrival: on_html_arrival(event.t, event.module, event.placeholder); break;
      case EventKind::kScroll: on_scroll(event.t); break;
      case EventKind::kClick: on_click(event.t, event.module); break;
      case EventKind::kNetwork: on_network(event.t, event.version); break;
      case EventKind::kTimeout: on_timeout(event.t, event.module); break;
      case EventKind::kIdleFallback: on_idle_fallback(event.t, event.module); break;
    }
  }

  // -- event handlers -------------------------------------------------------

  void on_head_arrival(double t) {
    if (manifest_.shared_runtime_bytes > 0) {
      runtime_fetch_handle_ = submit_fetch("__runtime", manifest_.shared_runtime_bytes, t);
    } else {
      runtime_exec_done_ = true;
      runtime_exec_end_ms_ = t;
      runtime_fetch_done_ms_ = t;
    }
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      if (modules_[i].plan->trigger.kind == TriggerKind::kImmediate && t <= scenario_.end_ms) {
        fire_trigger(static_cast<int>(i), t, TriggerCause::kImmediate);
      }
    }
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      ModuleState& ms = modules_[i];
      if (ms.plan->prefetch && !ms.fetch_started && ms.spec->chunk_bytes > 0) {
        start_module_fetch(static_cast<int>(i), t);
      }
    }
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      if (modules_[i].plan->trigger.kind == TriggerKind::kIdle) {
        if (config_.supports_idle_callback) {
          idle_registrants_.push_back(static_cast<int>(i));
        } else {
          Event e{t + config_.idle_fallback_ms, EventKind::kIdleFallback, next_seq()};
          e.module = static_cast<int>(i);
          push(e);
        }
      }
    }
  }

  void on_html_arrival(double t, int module, bool placeholder) {
    ModuleState& ms = modules_[module];
    trace_.html_arrivals.push_back({ms.spec->id, t, placeholder});
    pending_paints_.push_back(
        {module, t, placeholder ? PaintKind::kPlaceholder : PaintKind::kContent});
    bool first_observable = placeholder || !ms.spec->suspense;
    if (first_observable && ms.visible_pending && !ms.trigger_fired && t <= scenario_.end_ms) {
      evaluate_visible(module, t);
    }
  }

  void on_scroll(double t) {
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      if (modules_[i].visible_pending && !modules_[i].trigger_fired) {
        evaluate_visible(static_cast<int>(i), t);
      }
    }
  }

  void evaluate_visible(int module, double t) {
    const ModuleState& ms = modules_[module];
    std::int64_t margin = ms.plan->trigger.root_margin_px.value_or(0);
    std::int64_t y = scroll_position_at(scenario_, std::min(t, scenario_.end_ms));
    if (viewport_visible(ms.spec->offset_px, ms.spec->height_px, y, scenario_.viewport_height_px,
                         margin)) {
      fire_trigger(module, t, TriggerCause::kVisible);
    }
  }

  void on_click(double t, int module) {
    ModuleState& ms = modules_[module];
    InteractionRecord record;
    record.module_id = ms.spec->id;
    record.click_ms = t;
    int idx = static_cast<int>(trace_.interactions.size());

    if (ms.hydrated && ms.hydration_end_ms <= t) {
      handled_by_thread_.push_back(idx);
    } else if (ms.spec->interactive) {
      record.dead = true;
      bool ssr_only = ms.plan->trigger.kind == TriggerKind::kSsrOnly;
      if (!ssr_only && !ms.trigger_fired) {
        fire_trigger(module, t, TriggerCause::kInteraction);
      }
      if (config_.interaction_replay == InteractionReplay::kQueued && !ssr_only) {
        replay_after_hydration_.push_back({idx, module});
      }
    } else if (!ms.trigger_fired && ms.plan->trigger.kind == TriggerKind::kInteraction) {
      fire_trigger(module, t, TriggerCause::kInteraction);
    }
    trace_.interactions.push_back(std::move(record));
  }

  void on_network(double t, long long version) {
    if (version != network_version_) return;  // stale boundary
    auto completed = network_.step_to(t);
    for (int handle : completed) {
      if (handle == runtime_fetch_handle_) {
        runtime_fetch_done_ms_ = t;
        enqueue_execute(kRuntimeIndex, t, manifest_.shared_runtime_bytes);
        continue;
      }
      int module = fetch_module_by_handle_.at(handle);
      ModuleState& ms = modules_[module];
      ms.fetch_done = true;
      ms.fetch_done_ms = t;
      if (ms.trigger_fired) {
        enqueue_execute(module, t, ms.spec->chunk_bytes);
        ms.exec_enqueued = true;
      }
      // Prefetched chunks without a fired trigger stay parked until it fires.
    }
    refresh_network_event();
  }

  void on_timeout(double t, int module) {
    ModuleState& ms = modules_[module];
    if (!ms.trigger_fired && !ms.hydrated) {
      fire_trigger(module, t, TriggerCause::kTimeout);
    }
  }

  void on_idle_fallback(double t, int module) {
    if (t > scenario_.end_ms) return;
    ModuleState& ms = modules_[module];
    if (!ms.trigger_fired) {
      fire_trigger(module, t, TriggerCause::kIdle);
    }
  }

  void on_task_end(double t) {
    RunningTask task = *running_;
    running_.reset();
    if (task.hydration) {
      ModuleState& ms = modules_[task.module];
      ms.hydrated = true;
      ms.hydration_end_ms = t;
      if (plan_.throttle == Throttle::kOneAtATime) gate_open_ = false;
    } else if (task.module == kRuntimeIndex) {
      runtime_exec_done_ = true;
      runtime_exec_end_ms_ = t;
      for (std::size_t i = 0; i < modules_.size(); ++i) {
        consider_hydration(static_cast<int>(i), t);
      }
    } else {
      ModuleState& ms = modules_[task.module];
      ms.exec_done = true;
      ms.exec_done_ms = t;
      consider_hydration(task.module, t);
    }
  }

  // -- trigger/fetch/execute/hydration plumbing -----------------------------

  void fire_trigger(int module, double t, TriggerCause cause) {
    ModuleState& ms = modules_[module];
    if (ms.trigger_fired || ms.plan->trigger.kind == TriggerKind::kSsrOnly) return;
    ms.trigger_fired = true;
    ms.trigger_ms = t;
    ms.trigger_cause = cause;
    ms.visible_pending = false;

    if (ms.spec->chunk_bytes > 0) {
      if (!ms.fetch_started) {
        start_module_fetch(module, t);
      } else if (ms.fetch_done && !ms.exec_enqueued) {
        enqueue_execute(module, t, ms.spec->chunk_bytes);
        ms.exec_enqueued = true;
      }
    }
    consider_hydration(module, t);
  }

  void start_module_fetch(int module, double t) {
    ModuleState& ms = modules_[module];
    ms.fetch_started = true;
    ms.fetch_handle = submit_fetch(ms.spec->id, ms.spec->chunk_bytes, t);
    fetch_module_by_handle_[ms.fetch_handle] = module;
  }

  int submit_fetch(const std::string& id, std::int64_t bytes, double t) {
    int handle = network_.submit(id, bytes, t);
    refresh_network_event();
    return handle;
  }

  void refresh_network_event() {
    auto next = network_.next_event_time();
    if (!next) return;
    Event e{*next, EventKind::kNetwork, next_seq()};
    e.version = ++network_version_;
    push(e);
  }

  void enqueue_execute(int module, double ready_ms, std::int64_t bytes) {
    double duration = static_cast<double>(bytes) / 10000.0 * config_.parse_cost_ms_per_10k_bytes *
                      env_.device.cpu_slowdown;
    ready_executes_.push_back({ready_ms, module, duration});
  }

  // Queue the module once its trigger fired and its code (chunk + runtime)
  // has executed.
  void consider_hydration(int module, double t) {
    ModuleState& ms = modules_[module];
    if (ms.hydration_queued || !ms.trigger_fired) return;
    if (ms.spec->chunk_bytes > 0 && !ms.exec_done) return;
    if (manifest_.shared_runtime_bytes > 0 && !runtime_exec_done_) return;
    ms.hydration_queued = true;
    ready_hydrations_.push_back({t, ms.plan->priority_rank, module});
  }

  // -- the main thread ------------------------------------------------------

  struct RunningTask {
    int module;
    bool hydration;
  };

  void dispatch(double t) {
    while (!running_) {
      int exec_at = -1;
      for (std::size_t i = 0; i < ready_executes_.size(); ++i) {
        if (exec_at < 0 || execute_before(ready_executes_[i], ready_executes_[exec_at])) {
          exec_at = static_cast<int>(i);
        }
      }
      int hydr_at = -1;
      bool hydration_allowed = plan_.throttle == Throttle::kParallel || gate_open_;
      if (hydration_allowed) {
        for (std::size_t i = 0; i < ready_hydrations_.size(); ++i) {
          if (hydr_at < 0 || hydration_before(ready_hydrations_[i], ready_hydrations_[hydr_at])) {
            hydr_at = static_cast<int>(i);
          }
        }
      }

      if (exec_at >= 0 &&
          (hydr_at < 0 || ready_executes_[exec_at].ready_ms <= ready_hydrations_[hydr_at].ready_ms)) {
        ReadyExecute chosen = ready_executes_[exec_at];
        ready_executes_.erase(ready_executes_.begin() + exec_at);
        start_execute(chosen, t);
      } else if (hydr_at >= 0) {
        ReadyHydration chosen = ready_hydrations_[hydr_at];
        ready_hydrations_.erase(ready_hydrations_.begin() + hydr_at);
        start_hydration(chosen, t);
      } else {
        // Thread is idle: reopen the throttle gate, then let at most one
        // idle-callback registrant run per idle instant.
        if (!gate_open_) {
          gate_open_ = true;
          continue;
        }
        while (!idle_registrants_.empty() && modules_[idle_registrants_.front()].trigger_fired) {
          idle_registrants_.pop_front();  // already triggered by a click or timeout
        }
        if (!idle_registrants_.empty() && t <= scenario_.end_ms && last_idle_fire_ < t) {
          int module = idle_registrants_.front();
          idle_registrants_.pop_front();
          last_idle_fire_ = t;
          fire_trigger(module, t, TriggerCause::kIdle);
          continue;
        }
        break;
      }
    }
  }

  static bool execute_before(const ReadyExecute& a, const ReadyExecute& b) {
    if (a.ready_ms != b.ready_ms) return a.ready_ms < b.ready_ms;
    return a.module < b.module;  // runtime (-1) ahead of chunks, then doc order
  }

  static bool hydration_before(const ReadyHydration& a, const ReadyHydration& b) {
    if (a.ready_ms != b.ready_ms) return a.ready_ms < b.ready_ms;
    if (a.priority_rank != b.priority_rank) return a.priority_rank < b.priority_rank;
    return a.module < b.module;
  }

  void start_execute(const ReadyExecute& exec, double t) {
    double end = t + exec.duration_ms;
    trace_.tasks.push_back({"execute",
                            exec.module == kRuntimeIndex ? std::string("__runtime")
                                                         : modules_[exec.module].spec->id,
                            t, end});
    running_ = RunningTask{exec.module, false};
    push({end, EventKind::kTaskEnd, next_seq()});
  }

  void start_hydration(const ReadyHydration& hydration, double t) {
    ModuleState& ms = modules_[hydration.module];
    double duration = ms.spec->hydration_cost_ms * env_.device.cpu_slowdown;
    double end = t + duration;
    trace_.tasks.push_back({"hydrate", ms.spec->id, t, end});
    double fetch_done = ms.spec->chunk_bytes > 0 ? ms.fetch_done_ms : runtime_fetch_done_ms_;
    trace_.hydrations.push_back(
        {ms.spec->id, ms.trigger_ms, ms.trigger_cause, fetch_done, t, end});
    running_ = RunningTask{hydration.module, true};
    push({end, EventKind::kTaskEnd, next_seq()});
  }

  // -- wrap-up ---------------------------------------------------------------

  SimTrace finalize() {
    for (const auto& record : network_.records()) {
      trace_.fetches.push_back(
          {record.id, record.bytes, record.request_ms, record.first_byte_ms, record.done_ms});
    }

    auto busy = merged_busy(trace_.tasks);
    for (const auto& paint : pending_paints_) {
      trace_.paints.push_back({modules_[paint.module].spec->id, first_free(busy, paint.arrival_ms),
                               paint.kind});
    }
    std::stable_sort(trace_.paints.begin(), trace_.paints.end(),
                     [](const PaintRecord& a, const PaintRecord& b) { return a.at_ms < b.at_ms; });

    for (int idx : handled_by_thread_) {
      trace_.interactions[idx].handled_ms = first_free(busy, trace_.interactions[idx].click_ms);
    }
    for (const auto& [idx, module] : replay_after_hydration_) {
      if (modules_[module].hydrated) {
        trace_.interactions[idx].handled_ms = modules_[module].hydration_end_ms;
      }
    }

    auto violations = check_trace(trace_, manifest_, plan_);
    if (!violations.empty()) {
      throw InternalError("trace self-check failed: " + violations.front());
    }
    return trace_;
  }

  void push(Event event) { heap_.push(event); }
  long long next_seq() { return seq_++; }

  struct PendingPaint {
    int module;
    double arrival_ms;
    PaintKind kind;
  };

  const PageManifest& manifest_;
  const HydrationPlan& plan_;
  const Environment& env_;
  const UserScenario& scenario_;
  const SimConfig& config_;

  NetworkSim network_;
  long long network_version_ = 0;
  int runtime_fetch_handle_ = -2;
  double runtime_fetch_done_ms_ = 0.0;
  bool runtime_exec_done_ = false;
  double runtime_exec_end_ms_ = 0.0;

  HtmlSchedule html_;
  std::vector<ModuleState> modules_;
  std::unordered_map<int, int> fetch_module_by_handle_;

  std::priority_queue<Event, std::vector<Event>, EventOrder> heap_;
  long long seq_ = 0;

  std::vector<ReadyExecute> ready_executes_;
  std::vector<ReadyHydration> ready_hydrations_;
  std::optional<RunningTask> running_;
  bool gate_open_ = true;
  std::deque<int> idle_registrants_;
  double last_idle_fire_ = -1.0;

  std::vector<PendingPaint> pending_paints_;
  std::vector<int> handled_by_thread_;
  std::vector<std::pair<int, int>> replay_after_hydration_;

  SimTrace trace_;
};

}  // namespace

SimTrace simulate(const PageManifest& manifest, const HydrationPlan& plan, const Environment& env,
                  const UserScenario& scenario, const SimConfig& config) {
  return Simulation(manifest, plan, env, scenario, config).run();
}

// ---------------------------------------------------------------------------

std::vector<std::string> check_trace(const SimTrace& trace, const PageManifest& manifest,
                                     const HydrationPlan& plan) {
  std::vector<std::string> out;
  constexpr double kEps = 1e-6;

  std::vector<TaskRecord> tasks = trace.tasks;
  std::sort(tasks.begin(), tasks.end(),
            [](const TaskRecord& a, const TaskRecord& b) { return a.start_ms < b.start_ms; });
  double total_duration = 0.0;
  double last_time = trace.head_arrival_ms;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].end_ms < tasks[i].start_ms) {
      out.push_back("task " + tasks[i].label + ":" + tasks[i].module_id + " ends before it starts");
    }
    if (i > 0 && tasks[i].start_ms < tasks[i - 1].end_ms - kEps) {
      out.push_back("tasks overlap: " + tasks[i - 1].module_id + " and " + tasks[i].module_id);
    }
    total_duration += tasks[i].end_ms - tasks[i].start_ms;
    last_time = std::max(last_time, tasks[i].end_ms);
  }

  for (const auto& fetch : trace.fetches) {
    if (!(fetch.request_ms <= fetch.first_byte_ms && fetch.first_byte_ms <= fetch.done_ms)) {
      out.push_back("fetch " + fetch.id + " violates request <= firstByte <= done");
    }
    if (fetch.bytes <= 0) {
      out.push_back("fetch " + fetch.id + " has non-positive bytes");
    }
    last_time = std::max(last_time, fetch.done_ms);
  }
  for (const auto& paint : trace.paints) last_time = std::max(last_time, paint.at_ms);
  for (const auto& arrival : trace.html_arrivals) last_time = std::max(last_time, arrival.at_ms);

  std::unordered_map<std::string, const ModulePlan*> plans;
  for (const auto& mp : plan.plans) plans[mp.module_id] = &mp;

  std::unordered_map<std::string, int> hydration_count;
  for (const auto& h : trace.hydrations) {
    ++hydration_count[h.module_id];
    const ModuleSpec* spec = manifest.find_module(h.module_id);
    if (!spec) {
      out.push_back("hydration for unknown module " + h.module_id);
      continue;
    }
    if (h.trigger_ms > h.task_start_ms + kEps) {
      out.push_back("hydration " + h.module_id + " starts before its trigger");
    }
    if (h.fetch_done_ms > h.task_start_ms + kEps) {
      out.push_back("hydration " + h.module_id + " starts before its chunk arrived");
    }
    double expected_end = h.task_start_ms + spec->hydration_cost_ms * trace.cpu_slowdown;
    if (std::abs(h.task_end_ms - expected_end) > kEps) {
      out.push_back("hydration " + h.module_id + " duration differs from cost * cpuSlowdown");
    }
    for (const auto& fetch : trace.fetches) {
      if (fetch.id == h.module_id &&
          fetch.request_ms + kEps < std::min(trace.head_arrival_ms, h.trigger_ms)) {
        out.push_back("fetch for " + h.module_id + " starts before head arrival and trigger");
      }
    }
    for (const auto& task : trace.tasks) {
      if (task.label == "execute" && task.module_id == h.module_id &&
          h.task_start_ms + kEps < task.end_ms) {
        out.push_back("hydration " + h.module_id + " starts before its chunk executed");
      }
    }
    auto it = plans.find(h.module_id);
    if (it != plans.end()) {
      if (it->second->trigger.kind == TriggerKind::kSsrOnly) {
        out.push_back("ssr-only module " + h.module_id + " hydrated");
      }
      if (h.trigger_cause == TriggerCause::kTimeout &&
          (!it->second->timeout_ms || *it->second->timeout_ms != h.trigger_ms)) {
        out.push_back("timeout-triggered hydration of " + h.module_id +
                      " does not fire exactly at timeoutMs");
      }
    }
  }
  for (const auto& [id, count] : hydration_count) {
    if (count > 1) out.push_back("module " + id + " hydrated more than once");
  }

  for (const auto& mp : plan.plans) {
    if (mp.trigger.kind != TriggerKind::kSsrOnly) continue;
    for (const auto& fetch : trace.fetches) {
      if (fetch.id == mp.module_id) {
        out.push_back("ssr-only module " + mp.module_id + " fetched");
      }
    }
    for (const auto& task : tasks) {
      if (task.module_id == mp.module_id) {
        out.push_back("ssr-only module " + mp.module_id + " ran a task");
      }
    }
  }

  if (plan.throttle == Throttle::kOneAtATime) {
    std::vector<const HydrationRecord*> hydrations;
    for (const auto& h : trace.hydrations) hydrations.push_back(&h);
    std::sort(hydrations.begin(), hydrations.end(),
              [](const HydrationRecord* a, const HydrationRecord* b) {
                return a->task_start_ms < b->task_start_ms;
              });
    for (std::size_t i = 1; i < hydrations.size(); ++i) {
      if (hydrations[i]->task_start_ms < hydrations[i - 1]->task_end_ms - kEps) {
        out.push_back("one-at-a-time hydrations overlap: " + hydrations[i]->module_id);
      }
    }
  }

  for (const auto& interaction : trace.interactions) {
    if (interaction.handled_ms && *interaction.handled_ms < interaction.click_ms - kEps) {
      out.push_back("interaction on " + interaction.module_id + " handled before the click");
    }
  }

  if (total_duration > last_time + kEps) {
    out.push_back("total task duration exceeds the trace span");
  }
  return out;
}

namespace {

std::string format_ms(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

}  // namespace

std::string trace_to_csv(const SimTrace& trace) {
  struct Row {
    double start;
    std::string kind;
    std::string id;
    double end;
    std::int64_t bytes;
  };
  std::vector<Row> rows;
  for (const auto& f : trace.fetches) {
    rows.push_back({f.request_ms, "fetch", f.id, f.done_ms, f.bytes});
  }
  for (const auto& a : trace.html_arrivals) {
    rows.push_back({a.at_ms, "html", a.placeholder ? a.module_id + "/placeholder" : a.module_id,
                    a.at_ms, 0});
  }
  for (const auto& t : trace.tasks) {
    rows.push_back({t.start_ms, t.label, t.module_id, t.end_ms, 0});
  }
  for (const auto& p : trace.paints) {
    rows.push_back({p.at_ms, "paint",
                    p.kind == PaintKind::kPlaceholder ? p.module_id + "/placeholder" : p.module_id,
                    p.at_ms, 0});
  }
  for (const auto& h : trace.hydrations) {
    rows.push_back({h.trigger_ms, "hydration", h.module_id, h.task_end_ms, 0});
  }
  for (const auto& i : trace.interactions) {
    rows.push_back({i.click_ms, "interaction", i.dead ? i.module_id + "/dead" : i.module_id,
                    i.handled_ms.value_or(i.click_ms), 0});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.id < b.id;
  });

  std::ostringstream out;
  out << "kind,id,t_start_ms,t_end_ms,bytes\n";
  for (const auto& row : rows) {
    out << row.kind << ',' << row.id << ',' << format_ms(row.start) << ',' << format_ms(row.end)
        << ',' << row.bytes << '\n';
  }
  return out.str();
}

}  // namespace hydrosim
