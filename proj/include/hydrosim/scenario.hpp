#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hydrosim {

struct UserEvent {
  enum class Kind { kScrollTo, kClick };

  double at_ms = 0.0;
  Kind kind = Kind::kScrollTo;
  std::int64_t scroll_y_px = 0;  // kScrollTo
  std::string module_id;         // kClick

  friend bool operator==(const UserEvent&, const UserEvent&) = default;
};

/// Scripted user: viewport, a sorted scroll/click timeline and the horizon.
/// Scroll position starts at 0 and changes instantaneously at scroll events.
struct UserScenario {
  std::int64_t viewport_height_px = 800;
  std::vector<UserEvent> events;  // ascending by at_ms
  double end_ms = 0.0;            // >= last event time

  friend bool operator==(const UserScenario&, const UserScenario&) = default;
};

/// Scenario JSON. Out-of-order events and end_ms < last event are errors,
/// never silently repaired.
UserScenario parse_scenario(const std::string& text);

std::string serialize_scenario(const UserScenario& scenario);

/// Scroll position at time t: y of the latest scrollTo with at_ms <= t,
/// else 0. Right-continuous step function. Throws ValidationError when t is
/// outside [0, end_ms].
std::int64_t scroll_position_at(const UserScenario& scenario, double t_ms);

}  // namespace hydrosim
