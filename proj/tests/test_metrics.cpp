#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hydrosim/errors.hpp"
#include "hydrosim/metrics.hpp"
#include "oracles.hpp"

using namespace hydrosim;

namespace {

SimTrace trace_with_paints(std::initializer_list<double> times) {
  SimTrace trace;
  for (double t : times) trace.paints.push_back({"m", t, PaintKind::kContent});
  return trace;
}

}  // namespace

TEST_CASE("compute_fcp takes the earliest paint of any kind") {
  CHECK(compute_fcp(trace_with_paints({350, 450})) == 350);

  SimTrace placeholder_only;
  placeholder_only.paints.push_back({"m", 500, PaintKind::kPlaceholder});
  CHECK(compute_fcp(placeholder_only) == 500);

  CHECK_THROWS_WITH_AS(compute_fcp(SimTrace{}), doctest::Contains("no paint"), ValidationError);
}

TEST_CASE("compute_lcp uses the flagged candidate, else the tallest in view") {
  UserScenario scenario;
  scenario.viewport_height_px = 800;
  scenario.end_ms = 10000;

  PageManifest manifest;
  ModuleSpec tall;
  tall.id = "tall";
  tall.offset_px = 0;
  tall.height_px = 600;
  tall.placeholder_height_px = 600;
  tall.chunk_bytes = 1000;
  tall.trigger_high_end = {TriggerKind::kImmediate, std::nullopt};
  tall.trigger_low_end = tall.trigger_high_end;
  manifest.modules.push_back(tall);
  ModuleSpec squat = tall;
  squat.id = "squat";
  squat.offset_px = 600;
  squat.height_px = 300;
  manifest.modules.push_back(squat);

  SimTrace trace;
  trace.paints.push_back({"squat", 350, PaintKind::kContent});
  trace.paints.push_back({"tall", 400, PaintKind::kContent});

  SUBCASE("no flags: tallest in-viewport module wins") {
    CHECK(compute_lcp(trace, manifest, scenario) == 400);
  }

  SUBCASE("a flagged visible candidate wins even when shorter") {
    manifest.modules[1].lcp_candidate = true;
    CHECK(compute_lcp(trace, manifest, scenario) == 350);
  }

  SUBCASE("flagged but below the fold falls back") {
    manifest.modules[1].lcp_candidate = true;
    manifest.modules[1].offset_px = 2000;
    CHECK(compute_lcp(trace, manifest, scenario) == 400);
  }

  SUBCASE("no content paints at all") {
    SimTrace empty;
    empty.paints.push_back({"tall", 100, PaintKind::kPlaceholder});
    CHECK_THROWS_AS(compute_lcp(empty, manifest, scenario), ValidationError);
  }
}

TEST_CASE("compute_tti examples") {
  SimConfig config;

  SUBCASE("no tasks: quiet immediately at FCP") {
    SimTrace trace = trace_with_paints({350});
    CHECK(compute_tti(trace, config) == 350);
  }

  SUBCASE("a long task pushes TTI to its end") {
    SimTrace trace = trace_with_paints({350});
    trace.tasks.push_back({"execute", "m", 1000, 1170});
    CHECK(compute_tti(trace, config) == 1170);
  }

  SUBCASE("more than two in-flight fetches block the quiet window") {
    SimTrace trace = trace_with_paints({100});
    trace.tasks.push_back({"execute", "m", 840, 900});  // 60 ms, long
    for (int i = 0; i < 3; ++i) {
      trace.fetches.push_back({"f" + std::to_string(i), 1000, 800, 900, 1200});
    }
    CHECK(compute_tti(trace, config) == 1200);
  }
}

TEST_CASE("compute_tbt sums only the excess over the threshold") {
  SimConfig config;
  SimTrace trace = trace_with_paints({100});

  SUBCASE("a 170 ms task contributes 120") {
    trace.tasks.push_back({"execute", "m", 500, 670});
    double tti = compute_tti(trace, config);
    CHECK(compute_tbt(trace, tti, config) == doctest::Approx(120.0));
  }

  SUBCASE("tasks at or below the threshold contribute nothing") {
    trace.tasks.push_back({"execute", "a", 500, 550});
    trace.tasks.push_back({"hydrate", "b", 600, 640});
    double tti = compute_tti(trace, config);
    CHECK(compute_tbt(trace, tti, config) == 0.0);
  }

  SUBCASE("no tasks, no blocking") {
    CHECK(compute_tbt(trace, compute_tti(trace, config), config) == 0.0);
  }
}

TEST_CASE("compute_cls counts in-viewport placeholder swaps scaled by height delta") {
  UserScenario scenario;
  scenario.viewport_height_px = 800;
  scenario.end_ms = 10000;

  PageManifest manifest;
  ModuleSpec widget;
  widget.id = "widget";
  widget.offset_px = 100;
  widget.height_px = 600;
  widget.placeholder_height_px = 400;
  widget.chunk_bytes = 1000;
  widget.suspense = true;
  widget.server_render_latency_ms = 500;
  widget.trigger_high_end = {TriggerKind::kImmediate, std::nullopt};
  widget.trigger_low_end = widget.trigger_high_end;
  manifest.modules.push_back(widget);

  SimTrace trace;
  trace.paints.push_back({"widget", 300, PaintKind::kPlaceholder});
  trace.paints.push_back({"widget", 700, PaintKind::kContent});

  SUBCASE("swap of 400->600 in an 800px viewport shifts by 0.25") {
    CHECK(compute_cls(trace, manifest, scenario) == doctest::Approx(0.25));
  }

  SUBCASE("matching placeholder height means no shift") {
    manifest.modules[0].placeholder_height_px = 600;
    CHECK(compute_cls(trace, manifest, scenario) == 0.0);
  }

  SUBCASE("a swap below the viewport does not count") {
    manifest.modules[0].offset_px = 3000;
    CHECK(compute_cls(trace, manifest, scenario) == 0.0);
  }
}

TEST_CASE("compute_fid_and_deadclicks") {
  SimTrace trace;

  SUBCASE("a click on a free thread has zero delay") {
    trace.interactions.push_back({"m", 5000, 5000.0, false});
    auto result = compute_fid_and_deadclicks(trace);
    REQUIRE(result.fid_ms.has_value());
    CHECK(*result.fid_ms == 0.0);
    CHECK(result.dead_clicks == 0);
  }

  SUBCASE("a click during a task waits for it") {
    trace.interactions.push_back({"m", 5000, 5040.0, false});
    auto result = compute_fid_and_deadclicks(trace);
    CHECK(*result.fid_ms == doctest::Approx(40.0));
  }

  SUBCASE("a lost dead click yields no FID and one dead click") {
    trace.interactions.push_back({"m", 5000, std::nullopt, true});
    auto result = compute_fid_and_deadclicks(trace);
    CHECK_FALSE(result.fid_ms.has_value());
    CHECK(result.dead_clicks == 1);
  }
}

TEST_CASE("compute_script_bytes sums every started fetch") {
  SimTrace trace;
  CHECK(compute_script_bytes(trace) == 0);
  trace.fetches.push_back({"__runtime", 60000, 0, 10, 100});
  trace.fetches.push_back({"a", 40000, 0, 10, 150});
  CHECK(compute_script_bytes(trace) == 100000);
}

TEST_CASE("compare_reports computes deltas, percents and handles zero baselines") {
  MetricsReport baseline;
  baseline.fcp_ms = 100;
  baseline.lcp_ms = 200;
  baseline.tti_ms = 300;
  baseline.tbt_ms = 170;
  baseline.cls = 0;
  baseline.script_bytes = 589371;
  MetricsReport variant = baseline;
  variant.script_bytes = 104938;
  variant.tbt_ms = 0;

  DeltaReport delta = compare_reports(baseline, variant);
  CHECK(*delta.metrics.at("scriptBytes").percent == doctest::Approx(-82.195).epsilon(0.001));
  CHECK(*delta.metrics.at("tbtMs").percent == doctest::Approx(-100.0));
  CHECK_FALSE(delta.metrics.at("cls").percent.has_value());  // zero baseline
  CHECK_FALSE(delta.metrics.at("fidMs").delta.has_value());  // absent on both sides

  DeltaReport self = compare_reports(baseline, baseline);
  for (const char* name : {"fcpMs", "lcpMs", "ttiMs", "tbtMs", "scriptBytes"}) {
    CHECK(*self.metrics.at(name).delta == 0.0);
  }
}

TEST_CASE("report JSON emission is byte-stable and sorted") {
  MetricsReport report;
  report.fcp_ms = 565.9;
  report.lcp_ms = 589.9;
  report.tti_ms = 600;
  report.tbt_ms = 0;
  report.cls = 0;
  report.script_bytes = 104938;
  std::string expected =
      "{\n"
      "  \"cls\": 0.00000,\n"
      "  \"deadClicks\": 0,\n"
      "  \"fcpMs\": 565.90,\n"
      "  \"fidMs\": null,\n"
      "  \"lcpMs\": 589.90,\n"
      "  \"scriptBytes\": 104938,\n"
      "  \"tbtMs\": 0.00,\n"
      "  \"ttiMs\": 600.00\n"
      "}";
  CHECK(report_to_json(report) == expected);
}

TEST_CASE("tbt and tti match their naive definitions on random traces") {
  std::mt19937 rng(31415);
  SimConfig config;

  for (int round = 0; round < 500; ++round) {
    SimTrace trace;
    trace.paints.push_back({"p", static_cast<double>(rng() % 500), PaintKind::kContent});

    double t = rng() % 400;
    int tasks = static_cast<int>(rng() % 8);
    for (int i = 0; i < tasks; ++i) {
      t += rng() % 300;  // gaps of zero are possible
      double duration = static_cast<double>(rng() % 2000) / 10.0;
      trace.tasks.push_back({"execute", "t" + std::to_string(i), t, t + duration});
      t += duration;
    }
    int fetches = static_cast<int>(rng() % 6);
    for (int i = 0; i < fetches; ++i) {
      double start = rng() % 2000;
      double duration = 1 + rng() % 3000;
      trace.fetches.push_back({"f" + std::to_string(i), 1000, start, start + 1, start + duration});
    }

    double fcp = compute_fcp(trace);
    double tti = compute_tti(trace, config);
    CHECK(tti == oracles::naive_tti(trace, config, fcp));
    CHECK(compute_tbt(trace, tti, config) ==
          doctest::Approx(oracles::naive_tbt(trace, fcp, tti, config)));
  }
}

TEST_CASE("end-to-end reports satisfy the metric orderings") {
  PageManifest manifest = fixtures::product_page();
  SimConfig config;
  for (const auto& name : preset_names()) {
    Environment env = preset(name);
    HydrationPlan plan = resolve_plan(manifest, env);
    UserScenario scenario = fixtures::walkthrough_scenario();
    SimTrace trace = simulate(manifest, plan, env, scenario, config);
    MetricsReport report = compute_report(trace, manifest, scenario, config);
    CHECK(report.fcp_ms <= report.lcp_ms);
    CHECK(report.fcp_ms <= report.tti_ms);
    CHECK(report.tbt_ms >= 0);
  }
}

TEST_CASE("the bundled mobile run paints first content long before its main content") {
  PageManifest bundled = baseline_transform(fixtures::product_page());
  Environment env = preset("mobile-slow3g");
  SimConfig config;
  UserScenario scenario = fixtures::empty_scenario();
  SimTrace trace = simulate(bundled, plan_for_baseline(bundled), env, scenario, config);
  MetricsReport report = compute_report(trace, bundled, scenario, config);
  // The monolithic execute+hydrate chain lands between the first paint and
  // the main-content paint, pushing LCP far past FCP.
  CHECK(report.lcp_ms > report.fcp_ms + 1000.0);
}

TEST_CASE("script bytes grow with scenario activity and cap at the baseline") {
  PageManifest manifest = fixtures::product_page();
  Environment env = preset("mobile-slow3g");
  SimConfig config;

  HydrationPlan plan = resolve_plan(manifest, env);
  SimTrace idle_trace = simulate(manifest, plan, env, fixtures::empty_scenario(), config);
  SimTrace busy_trace = simulate(manifest, plan, env, fixtures::walkthrough_scenario(), config);

  PageManifest bundled = baseline_transform(manifest);
  SimTrace baseline_trace = simulate(bundled, plan_for_baseline(bundled), env,
                                     fixtures::walkthrough_scenario(), config);

  std::int64_t idle_bytes = compute_script_bytes(idle_trace);
  std::int64_t busy_bytes = compute_script_bytes(busy_trace);
  std::int64_t baseline_bytes = compute_script_bytes(baseline_trace);
  CHECK(idle_bytes <= busy_bytes);
  CHECK(busy_bytes <= baseline_bytes);
  CHECK(idle_bytes == 104938);
  CHECK(baseline_bytes == 589371);
}
