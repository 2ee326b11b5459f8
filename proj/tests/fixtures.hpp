#pragma once

// The calibrated product-page fixture and scenarios shared by tests.

#include <string>

#include "hydrosim/manifest.hpp"
#include "hydrosim/scenario.hpp"

namespace fixtures {

inline std::string product_page_json() {
  return R"({
    "sharedRuntimeBytes": 60000,
    "headHtmlBytes": 12000,
    "modules": [
      {"id": "header", "priority": "high", "chunkBytes": 15000, "hydrationCostMs": 8,
       "htmlBytes": 645371, "serverRenderLatencyMs": 0, "suspense": false, "offsetPx": 0,
       "heightPx": 100, "placeholderHeightPx": 100, "interactive": true,
       "lcpCandidate": false, "trigger": {"kind": "immediate"}},
      {"id": "productDetail", "priority": "high", "chunkBytes": 29938, "hydrationCostMs": 10,
       "htmlBytes": 30000, "serverRenderLatencyMs": 0, "suspense": false, "offsetPx": 100,
       "heightPx": 1100, "placeholderHeightPx": 1100, "interactive": true,
       "lcpCandidate": true, "trigger": {"kind": "immediate"}},
      {"id": "recommendations", "priority": "medium", "chunkBytes": 120000, "hydrationCostMs": 12,
       "htmlBytes": 20000, "serverRenderLatencyMs": 150, "suspense": true, "offsetPx": 1800,
       "heightPx": 600, "placeholderHeightPx": 600, "interactive": true,
       "lcpCandidate": false, "trigger": {"kind": "visible", "rootMarginPx": 200},
       "timeoutMs": 10000},
      {"id": "footer", "priority": "low", "chunkBytes": 364433, "hydrationCostMs": 700,
       "htmlBytes": 8000, "serverRenderLatencyMs": 0, "suspense": false, "offsetPx": 2700,
       "heightPx": 200, "placeholderHeightPx": 200, "interactive": true,
       "lcpCandidate": false, "trigger": {"kind": "idle"},
       "triggerLowEnd": {"kind": "visible", "rootMarginPx": 0}}
    ]
  })";
}

inline hydrosim::PageManifest product_page() {
  return hydrosim::parse_manifest(product_page_json());
}

inline hydrosim::UserScenario empty_scenario(double end_ms = 10000) {
  hydrosim::UserScenario scenario;
  scenario.viewport_height_px = 800;
  scenario.end_ms = end_ms;
  return scenario;
}

// Scroll to the recommendations section at 3 s, click it at 5 s.
inline hydrosim::UserScenario walkthrough_scenario() {
  hydrosim::UserScenario scenario;
  scenario.viewport_height_px = 800;
  scenario.end_ms = 10000;
  scenario.events.push_back({3000, hydrosim::UserEvent::Kind::kScrollTo, 1800, ""});
  scenario.events.push_back({5000, hydrosim::UserEvent::Kind::kClick, 0, "recommendations"});
  return scenario;
}

}  // namespace fixtures
