#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hydrosim/environment.hpp"
#include "hydrosim/manifest.hpp"

namespace hydrosim {

enum class Throttle { kParallel, kOneAtATime };

const char* to_string(Throttle throttle);

/// Effective per-module hydration decision after adapting to the device.
struct ModulePlan {
  std::string module_id;
  TriggerRule trigger;
  std::optional<double> timeout_ms;
  bool prefetch = false;
  int priority_rank = 0;  // high=0, medium=1, low=2

  friend bool operator==(const ModulePlan&, const ModulePlan&) = default;
};

struct HydrationPlan {
  std::vector<ModulePlan> plans;  // one per manifest module, document order
  Throttle throttle = Throttle::kParallel;
  bool low_end = false;

  friend bool operator==(const HydrationPlan&, const HydrationPlan&) = default;
};

/// The hydration-manager configuration for a device: picks the trigger and
/// timeout profile by the low-end classification, prefetches visible-trigger
/// chunks on capable devices only, and serializes hydration on low-end.
HydrationPlan resolve_plan(const PageManifest& manifest, const Environment& env);

/// Plan for a baseline_transform output: everything immediate, nothing
/// prefetched, parallel hydration.
HydrationPlan plan_for_baseline(const PageManifest& manifest);

std::string plan_to_json(const HydrationPlan& plan);

}  // namespace hydrosim
