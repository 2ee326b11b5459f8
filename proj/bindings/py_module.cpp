#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hydrosim/engine.hpp"
#include "hydrosim/environment.hpp"
#include "hydrosim/errors.hpp"
#include "hydrosim/manifest.hpp"
#include "hydrosim/metrics.hpp"
#include "hydrosim/policy.hpp"
#include "hydrosim/scenario.hpp"

namespace py = pybind11;
using namespace hydrosim;

PYBIND11_MODULE(hydrosim, m) {
  m.doc() = "Deterministic page-load and hydration-strategy simulator";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  py::enum_<TriggerKind>(m, "TriggerKind")
      .value("IMMEDIATE", TriggerKind::kImmediate)
      .value("VISIBLE", TriggerKind::kVisible)
      .value("IDLE", TriggerKind::kIdle)
      .value("INTERACTION", TriggerKind::kInteraction)
      .value("SSR_ONLY", TriggerKind::kSsrOnly);

  py::enum_<Priority>(m, "Priority")
      .value("HIGH", Priority::kHigh)
      .value("MEDIUM", Priority::kMedium)
      .value("LOW", Priority::kLow);

  py::enum_<Throttle>(m, "Throttle")
      .value("PARALLEL", Throttle::kParallel)
      .value("ONE_AT_A_TIME", Throttle::kOneAtATime);

  py::enum_<InteractionReplay>(m, "InteractionReplay")
      .value("LOST", InteractionReplay::kLost)
      .value("QUEUED", InteractionReplay::kQueued);

  py::enum_<PaintKind>(m, "PaintKind")
      .value("PLACEHOLDER", PaintKind::kPlaceholder)
      .value("CONTENT", PaintKind::kContent);

  py::class_<TriggerRule>(m, "TriggerRule")
      .def(py::init<>())
      .def_readwrite("kind", &TriggerRule::kind)
      .def_readwrite("root_margin_px", &TriggerRule::root_margin_px);

  py::class_<ModuleSpec>(m, "ModuleSpec")
      .def(py::init<>())
      .def_readwrite("id", &ModuleSpec::id)
      .def_readwrite("priority", &ModuleSpec::priority)
      .def_readwrite("chunk_bytes", &ModuleSpec::chunk_bytes)
      .def_readwrite("hydration_cost_ms", &ModuleSpec::hydration_cost_ms)
      .def_readwrite("html_bytes", &ModuleSpec::html_bytes)
      .def_readwrite("server_render_latency_ms", &ModuleSpec::server_render_latency_ms)
      .def_readwrite("suspense", &ModuleSpec::suspense)
      .def_readwrite("offset_px", &ModuleSpec::offset_px)
      .def_readwrite("height_px", &ModuleSpec::height_px)
      .def_readwrite("placeholder_height_px", &ModuleSpec::placeholder_height_px)
      .def_readwrite("interactive", &ModuleSpec::interactive)
      .def_readwrite("lcp_candidate", &ModuleSpec::lcp_candidate)
      .def_readwrite("trigger_high_end", &ModuleSpec::trigger_high_end)
      .def_readwrite("trigger_low_end", &ModuleSpec::trigger_low_end)
      .def_readwrite("timeout_high_end_ms", &ModuleSpec::timeout_high_end_ms)
      .def_readwrite("timeout_low_end_ms", &ModuleSpec::timeout_low_end_ms);

  py::class_<PageManifest>(m, "PageManifest")
      .def(py::init<>())
      .def_readwrite("modules", &PageManifest::modules)
      .def_readwrite("shared_runtime_bytes", &PageManifest::shared_runtime_bytes)
      .def_readwrite("head_html_bytes", &PageManifest::head_html_bytes);

  py::class_<Violation>(m, "Violation")
      .def_readonly("module_id", &Violation::module_id)
      .def_readonly("field", &Violation::field)
      .def_readonly("message", &Violation::message)
      .def("__repr__", [](const Violation& v) {
        return "<Violation " + v.module_id + "." + v.field + ": " + v.message + ">";
      });

  py::class_<DeviceProfile>(m, "DeviceProfile")
      .def(py::init<>())
      .def_readwrite("cpu_slowdown", &DeviceProfile::cpu_slowdown)
      .def_readwrite("device_memory_gb", &DeviceProfile::device_memory_gb)
      .def_readwrite("cores", &DeviceProfile::cores);

  py::class_<ConnectionSignals>(m, "ConnectionSignals")
      .def(py::init<>())
      .def_readwrite("effective_type", &ConnectionSignals::effective_type)
      .def_readwrite("save_data", &ConnectionSignals::save_data);

  py::enum_<EffectiveType>(m, "EffectiveType")
      .value("SLOW_2G", EffectiveType::kSlow2g)
      .value("TWO_G", EffectiveType::k2g)
      .value("THREE_G", EffectiveType::k3g)
      .value("FOUR_G", EffectiveType::k4g);

  py::class_<NetworkProfile>(m, "NetworkProfile")
      .def(py::init<>())
      .def_readwrite("downlink_bps", &NetworkProfile::downlink_bps)
      .def_readwrite("rtt_ms", &NetworkProfile::rtt_ms)
      .def_readwrite("max_connections", &NetworkProfile::max_connections);

  py::class_<Environment>(m, "Environment")
      .def(py::init<>())
      .def_readwrite("device", &Environment::device)
      .def_readwrite("signals", &Environment::signals)
      .def_readwrite("network", &Environment::network);

  py::class_<ModulePlan>(m, "ModulePlan")
      .def_readonly("module_id", &ModulePlan::module_id)
      .def_readonly("trigger", &ModulePlan::trigger)
      .def_readonly("timeout_ms", &ModulePlan::timeout_ms)
      .def_readonly("prefetch", &ModulePlan::prefetch)
      .def_readonly("priority_rank", &ModulePlan::priority_rank);

  py::class_<HydrationPlan>(m, "HydrationPlan")
      .def_readonly("plans", &HydrationPlan::plans)
      .def_readonly("throttle", &HydrationPlan::throttle)
      .def_readonly("low_end", &HydrationPlan::low_end);

  py::class_<UserEvent>(m, "UserEvent")
      .def_readonly("at_ms", &UserEvent::at_ms)
      .def_readonly("scroll_y_px", &UserEvent::scroll_y_px)
      .def_readonly("module_id", &UserEvent::module_id);

  py::class_<UserScenario>(m, "UserScenario")
      .def(py::init<>())
      .def_readwrite("viewport_height_px", &UserScenario::viewport_height_px)
      .def_readwrite("end_ms", &UserScenario::end_ms)
      .def_readonly("events", &UserScenario::events);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("parse_cost_ms_per_10k_bytes", &SimConfig::parse_cost_ms_per_10k_bytes)
      .def_readwrite("long_task_threshold_ms", &SimConfig::long_task_threshold_ms)
      .def_readwrite("idle_fallback_ms", &SimConfig::idle_fallback_ms)
      .def_readwrite("supports_idle_callback", &SimConfig::supports_idle_callback)
      .def_readwrite("quiet_window_ms", &SimConfig::quiet_window_ms)
      .def_readwrite("interaction_replay", &SimConfig::interaction_replay)
      .def_readwrite("suspense_placeholder_bytes", &SimConfig::suspense_placeholder_bytes);

  py::class_<FetchRecord>(m, "FetchRecord")
      .def_readonly("id", &FetchRecord::id)
      .def_readonly("bytes", &FetchRecord::bytes)
      .def_readonly("request_ms", &FetchRecord::request_ms)
      .def_readonly("first_byte_ms", &FetchRecord::first_byte_ms)
      .def_readonly("done_ms", &FetchRecord::done_ms);

  py::class_<TaskRecord>(m, "TaskRecord")
      .def_readonly("label", &TaskRecord::label)
      .def_readonly("module_id", &TaskRecord::module_id)
      .def_readonly("start_ms", &TaskRecord::start_ms)
      .def_readonly("end_ms", &TaskRecord::end_ms);

  py::class_<PaintRecord>(m, "PaintRecord")
      .def_readonly("module_id", &PaintRecord::module_id)
      .def_readonly("at_ms", &PaintRecord::at_ms)
      .def_readonly("kind", &PaintRecord::kind);

  py::class_<HydrationRecord>(m, "HydrationRecord")
      .def_readonly("module_id", &HydrationRecord::module_id)
      .def_readonly("trigger_ms", &HydrationRecord::trigger_ms)
      .def_readonly("fetch_done_ms", &HydrationRecord::fetch_done_ms)
      .def_readonly("task_start_ms", &HydrationRecord::task_start_ms)
      .def_readonly("task_end_ms", &HydrationRecord::task_end_ms);

  py::class_<InteractionRecord>(m, "InteractionRecord")
      .def_readonly("module_id", &InteractionRecord::module_id)
      .def_readonly("click_ms", &InteractionRecord::click_ms)
      .def_readonly("handled_ms", &InteractionRecord::handled_ms)
      .def_readonly("dead", &InteractionRecord::dead);

  py::class_<HtmlArrivalRecord>(m, "HtmlArrivalRecord")
      .def_readonly("module_id", &HtmlArrivalRecord::module_id)
      .def_readonly("at_ms", &HtmlArrivalRecord::at_ms)
      .def_readonly("placeholder", &HtmlArrivalRecord::placeholder);

  py::class_<SimTrace>(m, "SimTrace")
      .def_readonly("fetches", &SimTrace::fetches)
      .def_readonly("tasks", &SimTrace::tasks)
      .def_readonly("paints", &SimTrace::paints)
      .def_readonly("hydrations", &SimTrace::hydrations)
      .def_readonly("interactions", &SimTrace::interactions)
      .def_readonly("html_arrivals", &SimTrace::html_arrivals)
      .def_readonly("head_arrival_ms", &SimTrace::head_arrival_ms)
      .def_readonly("cpu_slowdown", &SimTrace::cpu_slowdown);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("fcp_ms", &MetricsReport::fcp_ms)
      .def_readonly("lcp_ms", &MetricsReport::lcp_ms)
      .def_readonly("tti_ms", &MetricsReport::tti_ms)
      .def_readonly("tbt_ms", &MetricsReport::tbt_ms)
      .def_readonly("cls", &MetricsReport::cls)
      .def_readonly("fid_ms", &MetricsReport::fid_ms)
      .def_readonly("script_bytes", &MetricsReport::script_bytes)
      .def_readonly("dead_clicks", &MetricsReport::dead_clicks);

  py::class_<MetricDelta>(m, "MetricDelta")
      .def_readonly("baseline", &MetricDelta::baseline)
      .def_readonly("variant", &MetricDelta::variant)
      .def_readonly("delta", &MetricDelta::delta)
      .def_readonly("percent", &MetricDelta::percent);

  py::class_<DeltaReport>(m, "DeltaReport").def_readonly("metrics", &DeltaReport::metrics);

  py::class_<FetchRequest>(m, "FetchRequest")
      .def(py::init([](std::string id, std::int64_t bytes, double request_ms) {
             return FetchRequest{std::move(id), bytes, request_ms};
           }),
           py::arg("id"), py::arg("bytes"), py::arg("request_ms"))
      .def_readwrite("id", &FetchRequest::id)
      .def_readwrite("bytes", &FetchRequest::bytes)
      .def_readwrite("request_ms", &FetchRequest::request_ms);

  py::class_<FetchCompletion>(m, "FetchCompletion")
      .def_readonly("id", &FetchCompletion::id)
      .def_readonly("first_byte_ms", &FetchCompletion::first_byte_ms)
      .def_readonly("done_ms", &FetchCompletion::done_ms);

  py::class_<ModuleArrival>(m, "ModuleArrival")
      .def_readonly("module_id", &ModuleArrival::module_id)
      .def_readonly("placeholder_ms", &ModuleArrival::placeholder_ms)
      .def_readonly("content_ms", &ModuleArrival::content_ms);

  py::class_<HtmlSchedule>(m, "HtmlSchedule")
      .def_readonly("head_ms", &HtmlSchedule::head_ms)
      .def_readonly("modules", &HtmlSchedule::modules);

  m.def("parse_manifest", &parse_manifest, py::arg("text"));
  m.def("serialize_manifest", &serialize_manifest, py::arg("manifest"));
  m.def("validate_manifest", &validate_manifest, py::arg("manifest"));
  m.def("baseline_transform", &baseline_transform, py::arg("manifest"));
  m.def("preset", &preset, py::arg("name"));
  m.def("preset_names", [] { return preset_names(); });
  m.def("is_low_end", [](const DeviceProfile& d, const ConnectionSignals& s) {
    return is_low_end(d, s);
  });
  m.def("parse_environment", &parse_environment, py::arg("text"));
  m.def("resolve_plan", &resolve_plan, py::arg("manifest"), py::arg("env"));
  m.def("plan_for_baseline", &plan_for_baseline, py::arg("manifest"));
  m.def("plan_to_json", &plan_to_json, py::arg("plan"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"));
  m.def("scroll_position_at", &scroll_position_at, py::arg("scenario"), py::arg("t_ms"));
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("viewport_visible", &viewport_visible, py::arg("offset_px"), py::arg("height_px"),
        py::arg("scroll_y_px"), py::arg("viewport_height_px"), py::arg("root_margin_px"));
  m.def("simulate", &simulate, py::arg("manifest"), py::arg("plan"), py::arg("env"),
        py::arg("scenario"), py::arg("config") = SimConfig{});
  m.def("fetch_schedule", &fetch_schedule, py::arg("requests"), py::arg("network"));
  m.def("html_arrival_times", &html_arrival_times, py::arg("manifest"), py::arg("network"),
        py::arg("suspense_placeholder_bytes") = 200);
  m.def("next_idle", &next_idle, py::arg("trace"), py::arg("from_ms"));
  m.def("check_trace", &check_trace, py::arg("trace"), py::arg("manifest"), py::arg("plan"));
  m.def("trace_to_csv", &trace_to_csv, py::arg("trace"));
  m.def("compute_fcp", &compute_fcp, py::arg("trace"));
  m.def("compute_lcp", &compute_lcp, py::arg("trace"), py::arg("manifest"), py::arg("scenario"));
  m.def("compute_tti", &compute_tti, py::arg("trace"), py::arg("config"));
  m.def("compute_tbt", &compute_tbt, py::arg("trace"), py::arg("tti_ms"), py::arg("config"));
  m.def("compute_cls", &compute_cls, py::arg("trace"), py::arg("manifest"), py::arg("scenario"));
  m.def("compute_script_bytes", &compute_script_bytes, py::arg("trace"));
  m.def("compute_report", &compute_report, py::arg("trace"), py::arg("manifest"),
        py::arg("scenario"), py::arg("config"));
  m.def("compare_reports", &compare_reports, py::arg("baseline"), py::arg("variant"));
  m.def("report_to_json", &report_to_json, py::arg("report"));
  m.def("delta_to_json", &delta_to_json, py::arg("delta"));
}
