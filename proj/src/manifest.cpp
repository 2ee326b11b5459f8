#include "hydrosim/manifest.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "hydrosim/errors.hpp"
#include "json_detail.hpp"

namespace hydrosim {

using detail::Json;

const char* to_string(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::kImmediate: return "immediate";
    case TriggerKind::kVisible: return "visible";
    case TriggerKind::kIdle: return "idle";
    case TriggerKind::kInteraction: return "interaction";
    case TriggerKind::kSsrOnly: return "ssr-only";
  }
  return "?";
}

std::optional<TriggerKind> trigger_kind_from_string(const std::string& text) {
  if (text == "immediate") return TriggerKind::kImmediate;
  if (text == "visible") return TriggerKind::kVisible;
  if (text == "idle") return TriggerKind::kIdle;
  if (text == "interaction") return TriggerKind::kInteraction;
  if (text == "ssr-only") return TriggerKind::kSsrOnly;
  return std::nullopt;
}

const char* to_string(Priority priority) {
  switch (priority) {
    case Priority::kHigh: return "high";
    case Priority::kMedium: return "medium";
    case Priority::kLow: return "low";
  }
  return "?";
}

std::optional<Priority> priority_from_string(const std::string& text) {
  if (text == "high") return Priority::kHigh;
  if (text == "medium") return Priority::kMedium;
  if (text == "low") return Priority::kLow;
  return std::nullopt;
}

const ModuleSpec* PageManifest::find_module(const std::string& id) const {
  for (const auto& module : modules) {
    if (module.id == id) return &module;
  }
  return nullptr;
}

int PageManifest::module_index(const std::string& id) const {
  for (std::size_t i = 0; i < modules.size(); ++i) {
    if (modules[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

namespace {

TriggerRule parse_trigger(const Json& value, const std::string& where) {
  if (!value.is_object()) {
    throw ParseError(where + ": expected an object");
  }
  detail::reject_unknown_keys(value, {"kind", "rootMarginPx"}, where);
  TriggerRule rule;
  std::string kind = detail::as_string(detail::require(value, "kind", where), where + ".kind");
  auto parsed = trigger_kind_from_string(kind);
  if (!parsed) {
    throw ParseError(where + ".kind: unknown trigger kind \"" + kind + "\"");
  }
  rule.kind = *parsed;
  if (value.contains("rootMarginPx")) {
    rule.root_margin_px = detail::as_int(value["rootMarginPx"], where + ".rootMarginPx");
  }
  return rule;
}

Json trigger_to_json(const TriggerRule& rule) {
  Json out;
  out["kind"] = to_string(rule.kind);
  if (rule.root_margin_px) out["rootMarginPx"] = *rule.root_margin_px;
  return out;
}

const std::set<std::string> kModuleKeys = {
    "id",           "priority",     "chunkBytes",          "hydrationCostMs",
    "htmlBytes",    "serverRenderLatencyMs", "suspense",   "offsetPx",
    "heightPx",     "placeholderHeightPx",   "interactive", "lcpCandidate",
    "trigger",      "triggerLowEnd", "timeoutMs",          "timeoutLowEndMs"};

ModuleSpec parse_module(const Json& value, std::size_t index) {
  const std::string where = "modules[" + std::to_string(index) + "]";
  if (!value.is_object()) {
    throw ParseError(where + ": expected an object");
  }
  detail::reject_unknown_keys(value, kModuleKeys, where);

  ModuleSpec module;
  module.id = detail::as_string(detail::require(value, "id", where), where + ".id");
  const std::string who = where + " (" + module.id + ")";

  std::string priority =
      detail::as_string(detail::require(value, "priority", who), who + ".priority");
  auto parsed_priority = priority_from_string(priority);
  if (!parsed_priority) {
    throw ParseError(who + ".priority: unknown priority \"" + priority + "\"");
  }
  module.priority = *parsed_priority;

  module.chunk_bytes = detail::as_int(detail::require(value, "chunkBytes", who), who + ".chunkBytes");
  module.hydration_cost_ms =
      detail::as_number(detail::require(value, "hydrationCostMs", who), who + ".hydrationCostMs");
  module.html_bytes = detail::as_int(detail::require(value, "htmlBytes", who), who + ".htmlBytes");
  module.server_render_latency_ms = detail::as_number(
      detail::require(value, "serverRenderLatencyMs", who), who + ".serverRenderLatencyMs");
  module.suspense = detail::as_bool(detail::require(value, "suspense", who), who + ".suspense");
  module.offset_px = detail::as_int(detail::require(value, "offsetPx", who), who + ".offsetPx");
  module.height_px = detail::as_int(detail::require(value, "heightPx", who), who + ".heightPx");
  module.placeholder_height_px = detail::as_int(
      detail::require(value, "placeholderHeightPx", who), who + ".placeholderHeightPx");
  module.interactive =
      detail::as_bool(detail::require(value, "interactive", who), who + ".interactive");
  module.lcp_candidate =
      detail::as_bool(detail::require(value, "lcpCandidate", who), who + ".lcpCandidate");
  module.trigger_high_end = parse_trigger(detail::require(value, "trigger", who), who + ".trigger");
  if (value.contains("triggerLowEnd")) {
    module.trigger_low_end = parse_trigger(value["triggerLowEnd"], who + ".triggerLowEnd");
  } else {
    module.trigger_low_end = module.trigger_high_end;
  }
  if (value.contains("timeoutMs")) {
    module.timeout_high_end_ms = detail::as_number(value["timeoutMs"], who + ".timeoutMs");
  }
  if (value.contains("timeoutLowEndMs")) {
    module.timeout_low_end_ms =
        detail::as_number(value["timeoutLowEndMs"], who + ".timeoutLowEndMs");
  }
  return module;
}

void check_trigger(const ModuleSpec& module, const TriggerRule& rule, const std::string& field,
                   std::vector<Violation>& out) {
  if (rule.kind == TriggerKind::kVisible) {
    if (!rule.root_margin_px) {
      out.push_back({module.id, field + ".rootMarginPx",
                     "rootMarginPx is required when kind is visible"});
    } else if (*rule.root_margin_px < 0) {
      out.push_back({module.id, field + ".rootMarginPx", "rootMarginPx must be >= 0"});
    }
  } else if (rule.root_margin_px) {
    out.push_back({module.id, field + ".rootMarginPx",
                   "rootMarginPx is only allowed when kind is visible"});
  }
}

}  // namespace

PageManifest parse_manifest(const std::string& text) {
  Json root = detail::parse_json(text, "manifest");
  if (!root.is_object()) {
    throw ParseError("manifest: expected a JSON object");
  }
  detail::reject_unknown_keys(root, {"sharedRuntimeBytes", "headHtmlBytes", "modules"}, "manifest");

  PageManifest manifest;
  manifest.shared_runtime_bytes = detail::as_int(
      detail::require(root, "sharedRuntimeBytes", "manifest"), "manifest.sharedRuntimeBytes");
  manifest.head_html_bytes = detail::as_int(detail::require(root, "headHtmlBytes", "manifest"),
                                            "manifest.headHtmlBytes");
  const Json& modules = detail::require(root, "modules", "manifest");
  if (!modules.is_array()) {
    throw ParseError("manifest.modules: expected an array");
  }
  for (std::size_t i = 0; i < modules.size(); ++i) {
    manifest.modules.push_back(parse_module(modules[i], i));
  }

  auto violations = validate_manifest(manifest);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    std::string msg = "manifest invalid: " + v.message + " (field " + v.field;
    if (!v.module_id.empty()) msg += ", module " + v.module_id;
    msg += ")";
    if (violations.size() > 1) {
      msg += " and " + std::to_string(violations.size() - 1) + " more violation(s)";
    }
    throw ValidationError(msg);
  }
  return manifest;
}

std::string serialize_manifest(const PageManifest& manifest) {
  Json root;
  root["sharedRuntimeBytes"] = manifest.shared_runtime_bytes;
  root["headHtmlBytes"] = manifest.head_html_bytes;
  root["modules"] = Json::array();
  for (const auto& module : manifest.modules) {
    Json m;
    m["id"] = module.id;
    m["priority"] = to_string(module.priority);
    m["chunkBytes"] = module.chunk_bytes;
    m["hydrationCostMs"] = module.hydration_cost_ms;
    m["htmlBytes"] = module.html_bytes;
    m["serverRenderLatencyMs"] = module.server_render_latency_ms;
    m["suspense"] = module.suspense;
    m["offsetPx"] = module.offset_px;
    m["heightPx"] = module.height_px;
    m["placeholderHeightPx"] = module.placeholder_height_px;
    m["interactive"] = module.interactive;
    m["lcpCandidate"] = module.lcp_candidate;
    m["trigger"] = trigger_to_json(module.trigger_high_end);
    if (module.trigger_low_end != module.trigger_high_end) {
      m["triggerLowEnd"] = trigger_to_json(module.trigger_low_end);
    }
    if (module.timeout_high_end_ms) m["timeoutMs"] = *module.timeout_high_end_ms;
    if (module.timeout_low_end_ms) m["timeoutLowEndMs"] = *module.timeout_low_end_ms;
    root["modules"].push_back(std::move(m));
  }
  return root.dump(2);
}

std::vector<Violation> validate_manifest(const PageManifest& manifest) {
  std::vector<Violation> out;
  if (manifest.modules.empty()) {
    out.push_back({"", "modules", "manifest must contain at least one module"});
    return out;
  }
  if (manifest.shared_runtime_bytes < 0) {
    out.push_back({"", "sharedRuntimeBytes", "must be >= 0"});
  }
  if (manifest.head_html_bytes < 0) {
    out.push_back({"", "headHtmlBytes", "must be >= 0"});
  }

  std::unordered_set<std::string> seen;
  std::int64_t previous_offset = -1;
  for (std::size_t i = 0; i < manifest.modules.size(); ++i) {
    const ModuleSpec& module = manifest.modules[i];
    if (module.id.empty()) {
      out.push_back({module.id, "id", "module id must be non-empty"});
    }
    if (!seen.insert(module.id).second) {
      out.push_back({module.id, "id", "duplicate module id \"" + module.id + "\""});
    }

    bool ssr_only_both = module.trigger_high_end.kind == TriggerKind::kSsrOnly &&
                         module.trigger_low_end.kind == TriggerKind::kSsrOnly;
    if ((module.chunk_bytes == 0) != ssr_only_both) {
      out.push_back({module.id, "chunkBytes",
                     "chunkBytes must be 0 exactly when both triggers are ssr-only"});
    }
    if (module.chunk_bytes < 0) {
      out.push_back({module.id, "chunkBytes", "must be >= 0"});
    }
    if (module.hydration_cost_ms < 0) {
      out.push_back({module.id, "hydrationCostMs", "must be >= 0"});
    }
    if (module.html_bytes < 0) {
      out.push_back({module.id, "htmlBytes", "must be >= 0"});
    }
    if (module.height_px <= 0) {
      out.push_back({module.id, "heightPx", "must be > 0"});
    }
    if (module.placeholder_height_px < 0) {
      out.push_back({module.id, "placeholderHeightPx", "must be >= 0"});
    }
    if (module.offset_px < 0) {
      out.push_back({module.id, "offsetPx", "must be >= 0"});
    }
    if (module.suspense && module.server_render_latency_ms <= 0) {
      out.push_back({module.id, "serverRenderLatencyMs",
                     "suspense modules require serverRenderLatencyMs > 0"});
    }
    if (module.server_render_latency_ms < 0) {
      out.push_back({module.id, "serverRenderLatencyMs", "must be >= 0"});
    }
    check_trigger(module, module.trigger_high_end, "trigger", out);
    check_trigger(module, module.trigger_low_end, "triggerLowEnd", out);
    if (module.timeout_high_end_ms && *module.timeout_high_end_ms < 0) {
      out.push_back({module.id, "timeoutMs", "must be >= 0"});
    }
    if (module.timeout_low_end_ms && *module.timeout_low_end_ms < 0) {
      out.push_back({module.id, "timeoutLowEndMs", "must be >= 0"});
    }
    if (i > 0 && module.offset_px <= previous_offset) {
      out.push_back({module.id, "offsetPx",
                     "offsets must be strictly increasing in document order"});
    }
    previous_offset = module.offset_px;
  }

  if (manifest.modules.front().offset_px != 0) {
    out.push_back({manifest.modules.front().id, "offsetPx",
                   "the first module must start at the top of the document (offsetPx 0)"});
  }
  return out;
}

PageManifest baseline_transform(const PageManifest& manifest) {
  PageManifest out = manifest;
  std::int64_t coalesced = manifest.shared_runtime_bytes;
  for (auto& module : out.modules) {
    coalesced += module.chunk_bytes;
    module.chunk_bytes = 0;
    module.trigger_high_end = TriggerRule{TriggerKind::kImmediate, std::nullopt};
    module.trigger_low_end = module.trigger_high_end;
    module.timeout_high_end_ms.reset();
    module.timeout_low_end_ms.reset();
  }
  out.shared_runtime_bytes = coalesced;
  return out;
}

}  // namespace hydrosim
