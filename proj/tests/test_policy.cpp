#include <doctest.h>

#include <random>

#include "hydrosim/environment.hpp"
#include "hydrosim/manifest.hpp"
#include "hydrosim/policy.hpp"

using namespace hydrosim;

namespace {

// The footer/recommendations pair used across the decision-table checks.
PageManifest table_fixture() {
  PageManifest manifest;
  manifest.shared_runtime_bytes = 10000;

  ModuleSpec recommendations;
  recommendations.id = "recommendations";
  recommendations.priority = Priority::kMedium;
  recommendations.chunk_bytes = 40000;
  recommendations.hydration_cost_ms = 10;
  recommendations.html_bytes = 15000;
  recommendations.offset_px = 0;
  recommendations.height_px = 600;
  recommendations.placeholder_height_px = 600;
  recommendations.interactive = true;
  recommendations.trigger_high_end = {TriggerKind::kVisible, 200};
  recommendations.trigger_low_end = {TriggerKind::kVisible, 200};
  recommendations.timeout_high_end_ms = 10000;
  manifest.modules.push_back(recommendations);

  ModuleSpec footer;
  footer.id = "footer";
  footer.priority = Priority::kLow;
  footer.chunk_bytes = 30000;
  footer.hydration_cost_ms = 6;
  footer.html_bytes = 8000;
  footer.offset_px = 700;
  footer.height_px = 200;
  footer.placeholder_height_px = 200;
  footer.interactive = true;
  footer.trigger_high_end = {TriggerKind::kIdle, std::nullopt};
  footer.trigger_low_end = {TriggerKind::kVisible, 0};
  manifest.modules.push_back(footer);

  return manifest;
}

const ModulePlan& plan_for(const HydrationPlan& plan, const std::string& id) {
  for (const auto& mp : plan.plans) {
    if (mp.module_id == id) return mp;
  }
  REQUIRE(false);
  return plan.plans.front();
}

}  // namespace

TEST_CASE("footer picks idle on capable devices, visible on low-end") {
  PageManifest manifest = table_fixture();

  HydrationPlan desktop = resolve_plan(manifest, preset("desktop-fast"));
  CHECK_FALSE(desktop.low_end);
  CHECK(desktop.throttle == Throttle::kParallel);
  CHECK(plan_for(desktop, "footer").trigger.kind == TriggerKind::kIdle);

  Environment constrained = preset("mobile-slow3g");
  constrained.signals.save_data = true;
  HydrationPlan mobile = resolve_plan(manifest, constrained);
  CHECK(mobile.low_end);
  CHECK(mobile.throttle == Throttle::kOneAtATime);
  CHECK(plan_for(mobile, "footer").trigger.kind == TriggerKind::kVisible);
  CHECK_FALSE(plan_for(mobile, "footer").prefetch);
}

TEST_CASE("recommendations keeps its timeout and prefetch on capable devices only") {
  PageManifest manifest = table_fixture();

  HydrationPlan desktop = resolve_plan(manifest, preset("desktop-fast"));
  const ModulePlan& high = plan_for(desktop, "recommendations");
  CHECK(high.trigger.kind == TriggerKind::kVisible);
  CHECK(high.trigger.root_margin_px == 200);
  CHECK(high.prefetch);
  REQUIRE(high.timeout_ms.has_value());
  CHECK(*high.timeout_ms == 10000);

  HydrationPlan mobile = resolve_plan(manifest, preset("mobile-slow3g"));
  const ModulePlan& low = plan_for(mobile, "recommendations");
  CHECK(low.trigger.kind == TriggerKind::kVisible);
  CHECK_FALSE(low.prefetch);
  CHECK_FALSE(low.timeout_ms.has_value());
}

TEST_CASE("ssr-only modules never prefetch and never keep a timeout") {
  PageManifest manifest = table_fixture();
  ModuleSpec ssr;
  ssr.id = "legal";
  ssr.priority = Priority::kLow;
  ssr.chunk_bytes = 0;
  ssr.html_bytes = 500;
  ssr.offset_px = 1200;
  ssr.height_px = 100;
  ssr.trigger_high_end = {TriggerKind::kSsrOnly, std::nullopt};
  ssr.trigger_low_end = ssr.trigger_high_end;
  ssr.timeout_high_end_ms = 8000;  // dropped by the invariant
  manifest.modules.push_back(ssr);

  for (const auto& name : preset_names()) {
    HydrationPlan plan = resolve_plan(manifest, preset(name));
    const ModulePlan& mp = plan_for(plan, "legal");
    CHECK(mp.trigger.kind == TriggerKind::kSsrOnly);
    CHECK_FALSE(mp.prefetch);
    CHECK_FALSE(mp.timeout_ms.has_value());
  }
}

TEST_CASE("plan_for_baseline makes everything immediate and parallel") {
  PageManifest manifest = baseline_transform(table_fixture());
  HydrationPlan plan = plan_for_baseline(manifest);
  CHECK_FALSE(plan.low_end);
  CHECK(plan.throttle == Throttle::kParallel);
  REQUIRE(plan.plans.size() == 2);
  for (const auto& mp : plan.plans) {
    CHECK(mp.trigger.kind == TriggerKind::kImmediate);
    CHECK_FALSE(mp.timeout_ms.has_value());
    CHECK_FALSE(mp.prefetch);
  }
  CHECK(plan.plans[0].priority_rank == 1);  // medium
  CHECK(plan.plans[1].priority_rank == 2);  // low
}

TEST_CASE("the effective trigger is selected by the low-end flag alone") {
  PageManifest manifest = table_fixture();
  std::mt19937 rng(99);
  for (int i = 0; i < 200; ++i) {
    Environment env;
    env.device = {1.0 + rng() % 5, 0.5 + (rng() % 16) * 0.5, 1 + static_cast<int>(rng() % 8)};
    env.signals = {static_cast<EffectiveType>(rng() % 4), static_cast<bool>(rng() % 2)};
    env.network = {1e6 + rng() % 9000000, static_cast<double>(rng() % 400),
                   1 + static_cast<int>(rng() % 6)};
    HydrationPlan plan = resolve_plan(manifest, env);
    bool low = is_low_end(env.device, env.signals);
    CHECK(plan.low_end == low);
    CHECK((plan.throttle == Throttle::kOneAtATime) == low);
    for (std::size_t m = 0; m < manifest.modules.size(); ++m) {
      const ModuleSpec& spec = manifest.modules[m];
      CHECK(plan.plans[m].trigger == (low ? spec.trigger_low_end : spec.trigger_high_end));
      if (low) CHECK_FALSE(plan.plans[m].prefetch);
    }
    // Identical inputs give identical plans.
    CHECK(resolve_plan(manifest, env) == plan);
  }
}
