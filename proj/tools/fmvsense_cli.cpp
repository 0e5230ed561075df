// Command-line front end. Talks to the engine only through the C API.
//
//   fmvsense run --stream F [--config F] --events-out F [--cop-out F]
//   fmvsense run --print-config [--config F]
//   fmvsense simulate --scenario F --out F [--truth-out F] [--noise F] [--seed N]
//   fmvsense evaluate --pred F --truth F [--tol N]
//   fmvsense plan --width W --height H [--config F] [--context L]
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fmvsense/fmvsense.h"

namespace {

int exit_code(fmv_status s) {
  switch (s) {
    case FMV_OK:
      return 0;
    case FMV_ERR_IO:
      return 2;
    default:
      return 1;
  }
}

// Reports a failed call and converts it to an exit code.
int report(fmv_status s) {
  if (s != FMV_OK) std::fprintf(stderr, "fmvsense: %s\n", fmv_last_error());
  return exit_code(s);
}

struct ConfigDeleter {
  void operator()(fmv_config* c) const { fmv_config_free(c); }
};
struct EngineDeleter {
  void operator()(fmv_engine* e) const { fmv_engine_free(e); }
};
struct StringDeleter {
  void operator()(char* s) const { fmv_string_free(s); }
};
using ConfigPtr = std::unique_ptr<fmv_config, ConfigDeleter>;
using EnginePtr = std::unique_ptr<fmv_engine, EngineDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

fmv_status load_config(const std::string& path, ConfigPtr& out) {
  fmv_config* raw = nullptr;
  const fmv_status s = path.empty() ? fmv_config_default(&raw) : fmv_config_load(path.c_str(), &raw);
  out.reset(raw);
  return s;
}

// Runs a call that hands back a string and prints it.
template <class F>
int print_result(F&& call) {
  char* text = nullptr;
  const fmv_status s = call(&text);
  StringPtr owned(text);
  if (s != FMV_OK) return report(s);
  std::fputs(owned.get(), stdout);
  return 0;
}

struct RunArgs {
  std::string stream, config, events_out, cop_out;
  bool print_config = false;
};

int cmd_run(const RunArgs& a) {
  ConfigPtr cfg;
  if (const fmv_status s = load_config(a.config, cfg); s != FMV_OK) return report(s);
  if (a.print_config) {
    return print_result([&](char** out) { return fmv_config_to_json(cfg.get(), out); });
  }
  if (a.stream.empty() || a.events_out.empty()) {
    std::fprintf(stderr, "fmvsense run: --stream and --events-out are required\n");
    return 1;
  }

  fmv_engine* raw = nullptr;
  if (const fmv_status s = fmv_engine_create(cfg.get(), &raw); s != FMV_OK) return report(s);
  EnginePtr engine(raw);
  if (const fmv_status s = fmv_engine_push_file(engine.get(), a.stream.c_str()); s != FMV_OK) return report(s);
  if (const fmv_status s = fmv_engine_finish(engine.get()); s != FMV_OK) return report(s);
  const char* cop = a.cop_out.empty() ? nullptr : a.cop_out.c_str();
  if (const fmv_status s = fmv_engine_write_outputs(engine.get(), a.events_out.c_str(), cop); s != FMV_OK) {
    return report(s);
  }

  fmv_stats st{};
  fmv_engine_stats(engine.get(), &st);
  std::fprintf(stderr,
               "frames processed=%llu skipped=%llu cataloged=%llu | detections in=%llu gated=%llu merged=%llu | tracks born=%llu "
               "died=%llu | events=%llu ungeolocated=%llu\n",
               static_cast<unsigned long long>(st.frames_processed), static_cast<unsigned long long>(st.frames_skipped),
               static_cast<unsigned long long>(st.cataloging_invocations),
               static_cast<unsigned long long>(st.detections_in),
               static_cast<unsigned long long>(st.detections_after_gates),
               static_cast<unsigned long long>(st.detections_after_nms),
               static_cast<unsigned long long>(st.tracks_born), static_cast<unsigned long long>(st.tracks_died),
               static_cast<unsigned long long>(st.events_emitted),
               static_cast<unsigned long long>(st.events_ungeolocated));
  return 0;
}

struct SimulateArgs {
  std::string scenario, out, truth_out, noise;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a) {
  const std::string truth = a.truth_out.empty() ? a.out + ".truth.jsonl" : a.truth_out;
  const std::uint64_t* seed = a.seed ? &*a.seed : nullptr;
  return report(fmv_simulate_files(a.scenario.c_str(), a.noise.empty() ? nullptr : a.noise.c_str(), seed,
                                   a.out.c_str(), truth.c_str()));
}

int cmd_evaluate(const std::string& pred, const std::string& truth, std::uint64_t tol) {
  return print_result([&](char** out) { return fmv_evaluate_files(pred.c_str(), truth.c_str(), tol, out); });
}

int cmd_plan(int width, int height, const std::string& config, const std::string& context) {
  ConfigPtr cfg;
  if (const fmv_status s = load_config(config, cfg); s != FMV_OK) return report(s);
  const char* label = context.empty() ? nullptr : context.c_str();
  return print_result([&](char** out) { return fmv_plan_json(cfg.get(), width, height, label, out); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-gated event detection over aerial detection streams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fmv_version()));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the engine over a detection stream");
  run_cmd->add_option("--stream", run.stream, "Line-delimited frame records")->check(CLI::ExistingFile);
  run_cmd->add_option("--config", run.config, "Engine config (defaults when omitted)")->check(CLI::ExistingFile);
  run_cmd->add_option("--events-out", run.events_out, "Event log output");
  run_cmd->add_option("--cop-out", run.cop_out, "GeoJSON common operating picture output");
  run_cmd->add_flag("--print-config", run.print_config, "Print the effective config and exit");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a stream and ground truth from a scenario");
  sim_cmd->add_option("--scenario", sim.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim.out, "Stream output")->required();
  sim_cmd->add_option("--truth-out", sim.truth_out, "Ground truth output (default: <out>.truth.jsonl)");
  sim_cmd->add_option("--noise", sim.noise, "Noise parameters file")->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", sim.seed, "Noise seed (overrides the noise file)");

  std::string pred, truth;
  std::uint64_t tol = 7;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score an event log against ground truth");
  eval_cmd->add_option("--pred", pred, "Event log")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", truth, "Ground truth")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--tol", tol, "Trigger-frame tolerance")->capture_default_str();

  int width = 0, height = 0;
  std::string plan_config, plan_context;
  auto* plan_cmd = app.add_subcommand("plan", "Print the multi-scale tile plan");
  plan_cmd->add_option("--width", width, "Frame width")->required()->check(CLI::PositiveNumber);
  plan_cmd->add_option("--height", height, "Frame height")->required()->check(CLI::PositiveNumber);
  plan_cmd->add_option("--config", plan_config, "Engine config")->check(CLI::ExistingFile);
  plan_cmd->add_option("--context", plan_context, "Only this context label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*run_cmd) return cmd_run(run);
  if (*sim_cmd) return cmd_simulate(sim);
  if (*eval_cmd) return cmd_evaluate(pred, truth, tol);
  if (*plan_cmd) return cmd_plan(width, height, plan_config, plan_context);
  return 1;
}
