#include "hydrosim/policy.hpp"

#include "hydrosim/errors.hpp"
#include "json_detail.hpp"

namespace hydrosim {

using detail::Json;

const char* to_string(Throttle throttle) {
  return throttle == Throttle::kParallel ? "parallel" : "one-at-a-time";
}

HydrationPlan resolve_plan(const PageManifest& manifest, const Environment& env) {
  HydrationPlan plan;
  plan.low_end = is_low_end(env.device, env.signals);
  plan.throttle = plan.low_end ? Throttle::kOneAtATime : Throttle::kParallel;
  plan.plans.reserve(manifest.modules.size());
  for (const auto& module : manifest.modules) {
    ModulePlan mp;
    mp.module_id = module.id;
    mp.trigger = plan.low_end ? module.trigger_low_end : module.trigger_high_end;
    mp.timeout_ms = plan.low_end ? module.timeout_low_end_ms : module.timeout_high_end_ms;
    mp.prefetch = mp.trigger.kind == TriggerKind::kVisible && !plan.low_end;
    mp.priority_rank = static_cast<int>(module.priority);
    if (mp.trigger.kind == TriggerKind::kSsrOnly) {
      mp.prefetch = false;
      mp.timeout_ms.reset();
    }
    plan.plans.push_back(std::move(mp));
  }
  return plan;
}

HydrationPlan plan_for_baseline(const PageManifest& manifest) {
  HydrationPlan plan;
  plan.low_end = false;
  plan.throttle = Throttle::kParallel;
  plan.plans.reserve(manifest.modules.size());
  for (const auto& module : manifest.modules) {
    ModulePlan mp;
    mp.module_id = module.id;
    mp.trigger = TriggerRule{TriggerKind::kImmediate, std::nullopt};
    mp.prefetch = false;
    mp.priority_rank = static_cast<int>(module.priority);
    plan.plans.push_back(std::move(mp));
  }
  return plan;
}

std::string plan_to_json(const HydrationPlan& plan) {
  Json root;
  root["lowEnd"] = plan.low_end;
  root["throttle"] = to_string(plan.throttle);
  root["plans"] = Json::array();
  for (const auto& mp : plan.plans) {
    Json p;
    p["moduleId"] = mp.module_id;
    p["trigger"]["kind"] = to_string(mp.trigger.kind);
    if (mp.trigger.root_margin_px) {
      p["trigger"]["rootMarginPx"] = *mp.trigger.root_margin_px;
    }
    p["timeoutMs"] = mp.timeout_ms ? Json(*mp.timeout_ms) : Json(nullptr);
    p["prefetch"] = mp.prefetch;
    p["priorityRank"] = mp.priority_rank;
    root["plans"].push_back(std::move(p));
  }
  return root.dump(2);
}

}  // namespace hydrosim
