#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hydrosim {

enum class EffectiveType { kSlow2g, k2g, k3g, k4g };

const char* to_string(EffectiveType type);
std::optional<EffectiveType> effective_type_from_string(const std::string& text);

struct DeviceProfile {
  double cpu_slowdown = 1.0;  // >= 1
  double device_memory_gb = 8.0;
  int cores = 8;

  friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

struct ConnectionSignals {
  EffectiveType effective_type = EffectiveType::k4g;
  bool save_data = false;

  friend bool operator==(const ConnectionSignals&, const ConnectionSignals&) = default;
};

struct NetworkProfile {
  double downlink_bps = 10'000'000.0;  // bits per second, > 0
  double rtt_ms = 40.0;
  int max_connections = 6;

  double bytes_per_ms() const { return downlink_bps / 8.0 / 1000.0; }

  friend bool operator==(const NetworkProfile&, const NetworkProfile&) = default;
};

struct Environment {
  DeviceProfile device;
  ConnectionSignals signals;
  NetworkProfile network;

  friend bool operator==(const Environment&, const Environment&) = default;
};

/// Cutoffs for the low-end classification. Defaults follow the client-side
/// decision formula (deviceMemory <= 1, hardwareConcurrency <= 2).
struct LowEndThresholds {
  double memory_gb = 1.0;
  int cores = 2;
};

/// slowNet || saveData || lowMem || lowCPU. slowNet counts only 2g and
/// slow-2g; 3g is not slow for classification purposes.
bool is_low_end(const DeviceProfile& device, const ConnectionSignals& signals,
                const LowEndThresholds& thresholds = {});

/// The four experiment presets: desktop-fast, desktop-slow3g, mobile-fast,
/// mobile-slow3g. Throws ValidationError on unknown names.
Environment preset(const std::string& name);

const std::vector<std::string>& preset_names();

/// Environment JSON file ({"device": ..., "signals": ..., "network": ...}).
Environment parse_environment(const std::string& text);

std::string serialize_environment(const Environment& env);

}  // namespace hydrosim
