#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hydrosim/engine.hpp"
#include "hydrosim/environment.hpp"
#include "hydrosim/errors.hpp"
#include "hydrosim/manifest.hpp"
#include "hydrosim/metrics.hpp"
#include "hydrosim/policy.hpp"
#include "hydrosim/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw hydrosim::ValidationError("cannot read file \"" + path + "\"");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw hydrosim::ValidationError("cannot write file \"" + path + "\"");
  }
  out << content;
}

struct CommonOptions {
  std::string manifest_path;
  std::string scenario_path;
  std::string env_name;
  std::string env_file;
  std::string config_path;
  std::string out_path;
  std::string trace_path;
  std::string dump_plan_path;
};

struct Inputs {
  hydrosim::PageManifest manifest;
  hydrosim::UserScenario scenario;
  hydrosim::Environment env;
  hydrosim::SimConfig config;
};

Inputs load_inputs(const CommonOptions& options) {
  Inputs inputs;
  try {
    inputs.manifest = hydrosim::parse_manifest(read_file(options.manifest_path));
  } catch (const std::exception& e) {
    throw hydrosim::ValidationError(options.manifest_path + ": " + e.what());
  }
  try {
    inputs.scenario = hydrosim::parse_scenario(read_file(options.scenario_path));
  } catch (const std::exception& e) {
    throw hydrosim::ValidationError(options.scenario_path + ": " + e.what());
  }
  if (!options.env_file.empty()) {
    try {
      inputs.env = hydrosim::parse_environment(read_file(options.env_file));
    } catch (const std::exception& e) {
      throw hydrosim::ValidationError(options.env_file + ": " + e.what());
    }
  } else {
    inputs.env = hydrosim::preset(options.env_name);
  }
  if (!options.config_path.empty()) {
    try {
      inputs.config = hydrosim::parse_config(read_file(options.config_path));
    } catch (const std::exception& e) {
      throw hydrosim::ValidationError(options.config_path + ": " + e.what());
    }
  }
  return inputs;
}

struct RunResult {
  hydrosim::SimTrace trace;
  hydrosim::MetricsReport report;
};

RunResult run_policy(const Inputs& inputs, const std::string& policy,
                     const std::string& dump_plan_path) {
  hydrosim::PageManifest manifest = inputs.manifest;
  hydrosim::HydrationPlan plan;
  if (policy == "baseline") {
    manifest = hydrosim::baseline_transform(manifest);
    plan = hydrosim::plan_for_baseline(manifest);
  } else {
    plan = hydrosim::resolve_plan(manifest, inputs.env);
  }
  if (!dump_plan_path.empty()) {
    write_file(dump_plan_path, hydrosim::plan_to_json(plan) + "\n");
  }
  RunResult result;
  result.trace = hydrosim::simulate(manifest, plan, inputs.env, inputs.scenario, inputs.config);
  result.report =
      hydrosim::compute_report(result.trace, manifest, inputs.scenario, inputs.config);
  return result;
}

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    write_file(out_path, payload);
  }
}

int run_simulate(const CommonOptions& options, const std::string& policy) {
  Inputs inputs = load_inputs(options);
  RunResult result = run_policy(inputs, policy, options.dump_plan_path);
  emit(options.out_path, hydrosim::report_to_json(result.report) + "\n");
  if (!options.trace_path.empty()) {
    write_file(options.trace_path, hydrosim::trace_to_csv(result.trace));
  }
  return 0;
}

int run_compare(const CommonOptions& options) {
  Inputs inputs = load_inputs(options);
  // Two isolated pure computations; safe to overlap.
  auto baseline_future =
      std::async(std::launch::async, [&] { return run_policy(inputs, "baseline", ""); });
  auto mrah_future =
      std::async(std::launch::async, [&] { return run_policy(inputs, "mrah", options.dump_plan_path); });
  RunResult baseline = baseline_future.get();
  RunResult mrah = mrah_future.get();

  hydrosim::DeltaReport delta = hydrosim::compare_reports(baseline.report, mrah.report);
  std::ostringstream payload;
  payload << "{\n\"baseline\": " << hydrosim::report_to_json(baseline.report)
          << ",\n\"delta\": " << hydrosim::delta_to_json(delta)
          << ",\n\"mrah\": " << hydrosim::report_to_json(mrah.report) << "\n}\n";
  emit(options.out_path, payload.str());
  std::cout << hydrosim::delta_to_table(baseline.report, mrah.report, delta);
  if (!options.trace_path.empty()) {
    write_file(options.trace_path + ".baseline.csv", hydrosim::trace_to_csv(baseline.trace));
    write_file(options.trace_path + ".mrah.csv", hydrosim::trace_to_csv(mrah.trace));
  }
  return 0;
}

int run_presets() {
  for (const auto& name : hydrosim::preset_names()) {
    std::cout << name << "\n" << hydrosim::serialize_environment(hydrosim::preset(name)) << "\n";
  }
  return 0;
}

void add_common_options(CLI::App* cmd, CommonOptions& options, bool with_env) {
  cmd->add_option("--manifest", options.manifest_path, "Page manifest JSON")->required();
  cmd->add_option("--scenario", options.scenario_path, "User scenario JSON")->required();
  if (with_env) {
    auto* env = cmd->add_option("--env", options.env_name,
                                "Environment preset (desktop-fast, desktop-slow3g, mobile-fast, "
                                "mobile-slow3g)");
    auto* env_file = cmd->add_option("--env-file", options.env_file, "Environment JSON file");
    env->excludes(env_file);
  }
  cmd->add_option("--config", options.config_path, "Simulation config JSON");
  cmd->add_option("--out", options.out_path, "Write the report JSON here instead of stdout");
  cmd->add_option("--trace", options.trace_path, "Write a trace CSV here");
  cmd->add_option("--dump-plan", options.dump_plan_path, "Write the resolved hydration plan here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic page-load and hydration-strategy simulator"};
  app.require_subcommand(1);

  CommonOptions simulate_options;
  std::string policy = "mrah";
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run one policy and report metrics");
  add_common_options(simulate_cmd, simulate_options, true);
  simulate_cmd->add_option("--policy", policy, "mrah or baseline")
      ->check(CLI::IsMember({"mrah", "baseline"}));

  CommonOptions compare_options;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Run baseline and mrah on the same inputs and diff them");
  add_common_options(compare_cmd, compare_options, true);

  CLI::App* presets_cmd = app.add_subcommand("presets", "List environment presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate_cmd->parsed()) {
      if (simulate_options.env_name.empty() && simulate_options.env_file.empty()) {
        std::cerr << "error: one of --env or --env-file is required\n";
        return 1;
      }
      return run_simulate(simulate_options, policy);
    }
    if (compare_cmd->parsed()) {
      if (compare_options.env_name.empty() && compare_options.env_file.empty()) {
        std::cerr << "error: one of --env or --env-file is required\n";
        return 1;
      }
      return run_compare(compare_options);
    }
    if (presets_cmd->parsed()) {
      return run_presets();
    }
  } catch (const hydrosim::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
