#include "hydrosim/environment.hpp"

#include "hydrosim/errors.hpp"
#include "json_detail.hpp"

namespace hydrosim {

using detail::Json;

const char* to_string(EffectiveType type) {
  switch (type) {
    case EffectiveType::kSlow2g: return "slow-2g";
    case EffectiveType::k2g: return "2g";
    case EffectiveType::k3g: return "3g";
    case EffectiveType::k4g: return "4g";
  }
  return "?";
}

std::optional<EffectiveType> effective_type_from_string(const std::string& text) {
  if (text == "slow-2g") return EffectiveType::kSlow2g;
  if (text == "2g") return EffectiveType::k2g;
  if (text == "3g") return EffectiveType::k3g;
  if (text == "4g") return EffectiveType::k4g;
  return std::nullopt;
}

bool is_low_end(const DeviceProfile& device, const ConnectionSignals& signals,
                const LowEndThresholds& thresholds) {
  bool slow_net = signals.effective_type == EffectiveType::k2g ||
                  signals.effective_type == EffectiveType::kSlow2g;
  bool low_mem = device.device_memory_gb <= thresholds.memory_gb;
  bool low_cpu = device.cores <= thresholds.cores;
  return slow_net || signals.save_data || low_mem || low_cpu;
}

namespace {

DeviceProfile desktop_device() { return DeviceProfile{1.0, 8.0, 8}; }
DeviceProfile mobile_device() { return DeviceProfile{4.0, 1.0, 2}; }

NetworkProfile fast_network() { return NetworkProfile{10'000'000.0, 40.0, 6}; }
NetworkProfile slow3g_network() { return NetworkProfile{1'600'000.0, 300.0, 6}; }

}  // namespace

Environment preset(const std::string& name) {
  if (name == "desktop-fast") {
    return Environment{desktop_device(), {EffectiveType::k4g, false}, fast_network()};
  }
  if (name == "desktop-slow3g") {
    return Environment{desktop_device(), {EffectiveType::k3g, false}, slow3g_network()};
  }
  if (name == "mobile-fast") {
    return Environment{mobile_device(), {EffectiveType::k4g, false}, fast_network()};
  }
  if (name == "mobile-slow3g") {
    return Environment{mobile_device(), {EffectiveType::k3g, false}, slow3g_network()};
  }
  throw ValidationError("unknown preset \"" + name +
                        "\" (expected desktop-fast, desktop-slow3g, mobile-fast or mobile-slow3g)");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"desktop-fast", "desktop-slow3g", "mobile-fast",
                                                 "mobile-slow3g"};
  return names;
}

Environment parse_environment(const std::string& text) {
  Json root = detail::parse_json(text, "environment");
  if (!root.is_object()) {
    throw ParseError("environment: expected a JSON object");
  }
  detail::reject_unknown_keys(root, {"device", "signals", "network"}, "environment");

  Environment env;
  const Json& device = detail::require(root, "device", "environment");
  detail::reject_unknown_keys(device, {"cpuSlowdown", "deviceMemoryGb", "cores"}, "device");
  env.device.cpu_slowdown =
      detail::as_number(detail::require(device, "cpuSlowdown", "device"), "device.cpuSlowdown");
  env.device.device_memory_gb = detail::as_number(
      detail::require(device, "deviceMemoryGb", "device"), "device.deviceMemoryGb");
  env.device.cores =
      static_cast<int>(detail::as_int(detail::require(device, "cores", "device"), "device.cores"));

  const Json& signals = detail::require(root, "signals", "environment");
  detail::reject_unknown_keys(signals, {"effectiveType", "saveData"}, "signals");
  std::string type = detail::as_string(detail::require(signals, "effectiveType", "signals"),
                                       "signals.effectiveType");
  auto parsed = effective_type_from_string(type);
  if (!parsed) {
    throw ParseError("signals.effectiveType: unknown value \"" + type + "\"");
  }
  env.signals.effective_type = *parsed;
  env.signals.save_data =
      detail::as_bool(detail::require(signals, "saveData", "signals"), "signals.saveData");

  const Json& network = detail::require(root, "network", "environment");
  detail::reject_unknown_keys(network, {"downlinkBps", "rttMs", "maxConnections"}, "network");
  env.network.downlink_bps = detail::as_number(detail::require(network, "downlinkBps", "network"),
                                               "network.downlinkBps");
  env.network.rtt_ms =
      detail::as_number(detail::require(network, "rttMs", "network"), "network.rttMs");
  env.network.max_connections = static_cast<int>(
      detail::as_int(detail::require(network, "maxConnections", "network"), "network.maxConnections"));

  if (env.device.cpu_slowdown < 1.0) {
    throw ValidationError("environment invalid: cpuSlowdown must be >= 1 (field device.cpuSlowdown)");
  }
  if (env.device.device_memory_gb <= 0.0) {
    throw ValidationError(
        "environment invalid: deviceMemoryGb must be > 0 (field device.deviceMemoryGb)");
  }
  if (env.device.cores < 1) {
    throw ValidationError("environment invalid: cores must be >= 1 (field device.cores)");
  }
  if (env.network.downlink_bps <= 0.0) {
    throw ValidationError("environment invalid: downlinkBps must be > 0 (field network.downlinkBps)");
  }
  if (env.network.rtt_ms < 0.0) {
    throw ValidationError("environment invalid: rttMs must be >= 0 (field network.rttMs)");
  }
  if (env.network.max_connections < 1) {
    throw ValidationError(
        "environment invalid: maxConnections must be >= 1 (field network.maxConnections)");
  }
  return env;
}

std::string serialize_environment(const Environment& env) {
  Json root;
  root["device"] = {{"cpuSlowdown", env.device.cpu_slowdown},
                    {"deviceMemoryGb", env.device.device_memory_gb},
                    {"cores", env.device.cores}};
  root["signals"] = {{"effectiveType", to_string(env.signals.effective_type)},
                     {"saveData", env.signals.save_data}};
  root["network"] = {{"downlinkBps", env.network.downlink_bps},
                     {"rttMs", env.network.rtt_ms},
                     {"maxConnections", env.network.max_connections}};
  return root.dump(2);
}

}  // namespace hydrosim
