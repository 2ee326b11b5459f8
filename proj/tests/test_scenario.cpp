#include <doctest.h>

#include "hydrosim/errors.hpp"
#include "hydrosim/scenario.hpp"

using namespace hydrosim;

TEST_CASE("parse_scenario accepts an empty-interaction scenario") {
  UserScenario scenario =
      parse_scenario(R"({"viewportHeightPx": 800, "endMs": 10000, "events": []})");
  CHECK(scenario.viewport_height_px == 800);
  CHECK(scenario.end_ms == 10000);
  CHECK(scenario.events.empty());
}

TEST_CASE("parse_scenario reads a scroll+click timeline") {
  UserScenario scenario = parse_scenario(R"({
    "viewportHeightPx": 800,
    "endMs": 10000,
    "events": [
      {"atMs": 3000, "scrollTo": 1800},
      {"atMs": 5000, "click": "recommendations"}
    ]
  })");
  REQUIRE(scenario.events.size() == 2);
  CHECK(scenario.events[0].kind == UserEvent::Kind::kScrollTo);
  CHECK(scenario.events[0].scroll_y_px == 1800);
  CHECK(scenario.events[1].kind == UserEvent::Kind::kClick);
  CHECK(scenario.events[1].module_id == "recommendations");
}

TEST_CASE("parse_scenario rejects unsorted events rather than sorting them") {
  CHECK_THROWS_WITH_AS(parse_scenario(R"({
    "viewportHeightPx": 800,
    "endMs": 10000,
    "events": [
      {"atMs": 5000, "scrollTo": 100},
      {"atMs": 3000, "scrollTo": 200}
    ]
  })"),
                       doctest::Contains("sorted"), ValidationError);
}

TEST_CASE("parse_scenario rejects endMs before the last event") {
  CHECK_THROWS_AS(parse_scenario(R"({
    "viewportHeightPx": 800,
    "endMs": 1000,
    "events": [{"atMs": 3000, "scrollTo": 100}]
  })"),
                  ValidationError);
}

TEST_CASE("parse_scenario rejects events with both or neither action") {
  CHECK_THROWS_AS(parse_scenario(R"({
    "viewportHeightPx": 800, "endMs": 1000,
    "events": [{"atMs": 10, "scrollTo": 5, "click": "x"}]
  })"),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario(R"({
    "viewportHeightPx": 800, "endMs": 1000,
    "events": [{"atMs": 10}]
  })"),
                  ParseError);
}

TEST_CASE("scroll_position_at is a right-continuous step function") {
  UserScenario scenario;
  scenario.viewport_height_px = 800;
  scenario.end_ms = 10000;

  SUBCASE("no events") { CHECK(scroll_position_at(scenario, 4000) == 0); }

  SUBCASE("boundary at the event time") {
    scenario.events.push_back({3000, UserEvent::Kind::kScrollTo, 1800, ""});
    CHECK(scroll_position_at(scenario, 2999) == 0);
    CHECK(scroll_position_at(scenario, 3000) == 1800);
  }

  SUBCASE("two scrolls keep the latest applicable value") {
    scenario.events.push_back({1000, UserEvent::Kind::kScrollTo, 500, ""});
    scenario.events.push_back({2000, UserEvent::Kind::kScrollTo, 900, ""});
    CHECK(scroll_position_at(scenario, 1500) == 500);
    CHECK(scroll_position_at(scenario, 2000) == 900);
    CHECK(scroll_position_at(scenario, 999) == 0);
  }

  SUBCASE("changes only at scroll times") {
    scenario.events.push_back({1000, UserEvent::Kind::kScrollTo, 500, ""});
    scenario.events.push_back({4000, UserEvent::Kind::kClick, 0, "hero"});
    double probes[] = {1000, 1500, 3999.9, 4000, 9000};
    for (double t : probes) CHECK(scroll_position_at(scenario, t) == 500);
  }

  SUBCASE("out of range") {
    CHECK_THROWS_AS(scroll_position_at(scenario, -1), ValidationError);
    CHECK_THROWS_AS(scroll_position_at(scenario, 10001), ValidationError);
  }
}
