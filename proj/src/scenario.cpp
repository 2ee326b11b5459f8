#include "hydrosim/scenario.hpp"

#include "hydrosim/errors.hpp"
#include "json_detail.hpp"

namespace hydrosim {

using detail::Json;

UserScenario parse_scenario(const std::string& text) {
  Json root = detail::parse_json(text, "scenario");
  if (!root.is_object()) {
    throw ParseError("scenario: expected a JSON object");
  }
  detail::reject_unknown_keys(root, {"viewportHeightPx", "endMs", "events"}, "scenario");

  UserScenario scenario;
  scenario.viewport_height_px = detail::as_int(
      detail::require(root, "viewportHeightPx", "scenario"), "scenario.viewportHeightPx");
  scenario.end_ms = detail::as_number(detail::require(root, "endMs", "scenario"), "scenario.endMs");
  const Json& events = detail::require(root, "events", "scenario");
  if (!events.is_array()) {
    throw ParseError("scenario.events: expected an array");
  }

  double previous = -1.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string where = "events[" + std::to_string(i) + "]";
    const Json& event = events[i];
    if (!event.is_object()) {
      throw ParseError(where + ": expected an object");
    }
    detail::reject_unknown_keys(event, {"atMs", "scrollTo", "click"}, where);
    UserEvent parsed;
    parsed.at_ms = detail::as_number(detail::require(event, "atMs", where), where + ".atMs");
    if (parsed.at_ms < 0) {
      throw ValidationError("scenario invalid: atMs must be >= 0 (field " + where + ".atMs)");
    }
    bool has_scroll = event.contains("scrollTo");
    bool has_click = event.contains("click");
    if (has_scroll == has_click) {
      throw ParseError(where + ": expected exactly one of \"scrollTo\" or \"click\"");
    }
    if (has_scroll) {
      parsed.kind = UserEvent::Kind::kScrollTo;
      parsed.scroll_y_px = detail::as_int(event["scrollTo"], where + ".scrollTo");
      if (parsed.scroll_y_px < 0) {
        throw ValidationError("scenario invalid: scrollTo must be >= 0 (field " + where +
                              ".scrollTo)");
      }
    } else {
      parsed.kind = UserEvent::Kind::kClick;
      parsed.module_id = detail::as_string(event["click"], where + ".click");
    }
    if (parsed.at_ms < previous) {
      throw ValidationError("scenario invalid: events must be sorted ascending by atMs (field " +
                            where + ".atMs)");
    }
    previous = parsed.at_ms;
    scenario.events.push_back(std::move(parsed));
  }

  if (scenario.viewport_height_px <= 0) {
    throw ValidationError("scenario invalid: viewportHeightPx must be > 0 (field viewportHeightPx)");
  }
  if (!scenario.events.empty() && scenario.end_ms < scenario.events.back().at_ms) {
    throw ValidationError("scenario invalid: endMs must be >= the last event time (field endMs)");
  }
  if (scenario.end_ms < 0) {
    throw ValidationError("scenario invalid: endMs must be >= 0 (field endMs)");
  }
  return scenario;
}

std::string serialize_scenario(const UserScenario& scenario) {
  Json root;
  root["viewportHeightPx"] = scenario.viewport_height_px;
  root["endMs"] = scenario.end_ms;
  root["events"] = Json::array();
  for (const auto& event : scenario.events) {
    Json e;
    e["atMs"] = event.at_ms;
    if (event.kind == UserEvent::Kind::kScrollTo) {
      e["scrollTo"] = event.scroll_y_px;
    } else {
      e["click"] = event.module_id;
    }
    root["events"].push_back(std::move(e));
  }
  return root.dump(2);
}

std::int64_t scroll_position_at(const UserScenario& scenario, double t_ms) {
  if (t_ms < 0 || t_ms > scenario.end_ms) {
    throw ValidationError("scroll_position_at: t out of range [0, endMs]");
  }
  std::int64_t y = 0;
  for (const auto& event : scenario.events) {
    if (event.at_ms > t_ms) break;
    if (event.kind == UserEvent::Kind::kScrollTo) y = event.scroll_y_px;
  }
  return y;
}

}  // namespace hydrosim
