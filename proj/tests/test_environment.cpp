#include <doctest.h>

#include <random>

#include "hydrosim/environment.hpp"
#include "hydrosim/errors.hpp"

using namespace hydrosim;

TEST_CASE("presets match the experiment table") {
  Environment mobile_slow = preset("mobile-slow3g");
  CHECK(mobile_slow.device.cpu_slowdown == 4.0);
  CHECK(mobile_slow.device.device_memory_gb == 1.0);
  CHECK(mobile_slow.device.cores == 2);
  CHECK(mobile_slow.network.downlink_bps == 1600000.0);
  CHECK(mobile_slow.network.rtt_ms == 300.0);
  CHECK(mobile_slow.signals.effective_type == EffectiveType::k3g);
  CHECK(mobile_slow.network.max_connections == 6);
  CHECK_FALSE(mobile_slow.signals.save_data);

  Environment desktop_fast = preset("desktop-fast");
  CHECK(desktop_fast.device.cpu_slowdown == 1.0);
  CHECK(desktop_fast.device.device_memory_gb == 8.0);
  CHECK(desktop_fast.device.cores == 8);
  CHECK(desktop_fast.network.downlink_bps == 10000000.0);
  CHECK(desktop_fast.network.rtt_ms == 40.0);
  CHECK(desktop_fast.signals.effective_type == EffectiveType::k4g);

  CHECK_THROWS_AS(preset("tablet"), ValidationError);
}

TEST_CASE("is_low_end follows the signal formula") {
  DeviceProfile strong{1.0, 8.0, 8};
  CHECK_FALSE(is_low_end(strong, {EffectiveType::k4g, false}));
  CHECK(is_low_end(strong, {EffectiveType::k4g, true}));     // saveData
  CHECK(is_low_end(strong, {EffectiveType::k2g, false}));    // slow net
  CHECK(is_low_end(strong, {EffectiveType::kSlow2g, false}));
  CHECK_FALSE(is_low_end(strong, {EffectiveType::k3g, false}));  // 3g is not slow
  CHECK(is_low_end({1.0, 1.0, 8}, {EffectiveType::k4g, false}));  // low memory
  CHECK(is_low_end({1.0, 8.0, 2}, {EffectiveType::k4g, false}));  // few cores
}

TEST_CASE("presets classify onto the device dichotomy") {
  for (const auto& name : preset_names()) {
    Environment env = preset(name);
    bool low = is_low_end(env.device, env.signals);
    if (name.rfind("mobile", 0) == 0) {
      CHECK(low);
    } else {
      CHECK_FALSE(low);
    }
  }
}

TEST_CASE("is_low_end is monotone: worsening one signal never clears it") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    DeviceProfile device{1.0 + rng() % 4, 0.5 + (rng() % 16) * 0.5,
                         1 + static_cast<int>(rng() % 8)};
    ConnectionSignals signals{static_cast<EffectiveType>(rng() % 4),
                              static_cast<bool>(rng() % 2)};
    bool before = is_low_end(device, signals);
    if (!before) continue;

    DeviceProfile worse_mem = device;
    worse_mem.device_memory_gb = std::max(0.25, device.device_memory_gb - 1.0);
    CHECK(is_low_end(worse_mem, signals));

    DeviceProfile worse_cores = device;
    worse_cores.cores = std::max(1, device.cores - 1);
    CHECK(is_low_end(worse_cores, signals));

    ConnectionSignals worse_net = signals;
    worse_net.effective_type = EffectiveType::k2g;
    CHECK(is_low_end(device, worse_net));

    ConnectionSignals with_save_data = signals;
    with_save_data.save_data = true;
    CHECK(is_low_end(device, with_save_data));
  }
}

TEST_CASE("environment files round-trip and are validated") {
  Environment env = preset("desktop-slow3g");
  Environment parsed = parse_environment(serialize_environment(env));
  CHECK(parsed == env);

  CHECK_THROWS_AS(parse_environment(R"({
    "device": {"cpuSlowdown": 1, "deviceMemoryGb": 8, "cores": 8},
    "signals": {"effectiveType": "4g", "saveData": false},
    "network": {"downlinkBps": 0, "rttMs": 40, "maxConnections": 6}
  })"),
                  ValidationError);
  CHECK_THROWS_AS(parse_environment(R"({"device": {}})"), ParseError);
}
