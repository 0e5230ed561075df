#include "fmvsense/fmvsense.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include <json.hpp>

#include "fmvsense/config.hpp"
#include "fmvsense/error.hpp"
#include "fmvsense/evaluate.hpp"
#include "fmvsense/file_io.hpp"
#include "fmvsense/pipeline.hpp"
#include "fmvsense/serialization.hpp"
#include "fmvsense/simulator.hpp"

struct fmv_config {
  fmv::EngineConfig cfg;
};

struct fmv_engine {
  explicit fmv_engine(const fmv::EngineConfig& c) : engine(c) {}
  fmv::Engine engine;
  std::size_t pushed_lines = 0;
};

namespace {

thread_local std::string g_last_error;

fmv_status fail(fmv_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
fmv_status guarded(F&& body) {
  try {
    return body();
  } catch (const fmv::ValidationError& e) {
    return fail(FMV_ERR_VALIDATION, e.what());
  } catch (const fmv::IoError& e) {
    return fail(FMV_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FMV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FMV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FMV_ERR_INTERNAL, "unknown error");
  }
}

fmv_status give_string(const std::string& s, char** out) {
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (buf == nullptr) return fail(FMV_ERR_INTERNAL, "out of memory");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  *out = buf;
  return FMV_OK;
}

fmv_status null_arg(const char* what) { return fail(FMV_ERR_ARGUMENT, std::string("null argument: ") + what); }

fmv_status require_finished(const fmv_engine* e) {
  if (!e->engine.finished()) return fail(FMV_ERR_STATE, "engine results requested before fmv_engine_finish");
  return FMV_OK;
}

}  // namespace

extern "C" {

const char* fmv_version(void) { return "0.1.0"; }

const char* fmv_last_error(void) { return g_last_error.c_str(); }

void fmv_string_free(char* s) { std::free(s); }

fmv_status fmv_config_default(fmv_config** out) {
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = new fmv_config{};
    return FMV_OK;
  });
}

fmv_status fmv_config_parse(const char* json_text, fmv_config** out) {
  if (json_text == nullptr) return null_arg("json_text");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = new fmv_config{fmv::parse_config(json_text)};
    return FMV_OK;
  });
}

fmv_status fmv_config_load(const char* path, fmv_config** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = new fmv_config{fmv::load_config(path)};
    return FMV_OK;
  });
}

fmv_status fmv_config_to_json(const fmv_config* cfg, char** out) {
  if (cfg == nullptr) return null_arg("cfg");
  if (out == nullptr) return null_arg("out");
  return guarded([&] { return give_string(fmv::serialize_config(cfg->cfg), out); });
}

void fmv_config_free(fmv_config* cfg) { delete cfg; }

fmv_status fmv_engine_create(const fmv_config* cfg, fmv_engine** out) {
  if (cfg == nullptr) return null_arg("cfg");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    *out = new fmv_engine(cfg->cfg);
    return FMV_OK;
  });
}

void fmv_engine_free(fmv_engine* engine) { delete engine; }

fmv_status fmv_engine_push_frame(fmv_engine* engine, const char* json_line) {
  if (engine == nullptr) return null_arg("engine");
  if (json_line == nullptr) return null_arg("json_line");
  if (engine->engine.finished()) return fail(FMV_ERR_STATE, "push after fmv_engine_finish");
  return guarded([&] {
    const std::size_t line = ++engine->pushed_lines;
    try {
      engine->engine.push(fmv::parse_frame(json_line));
    } catch (const fmv::ValidationError& e) {
      throw fmv::ValidationError("line " + std::to_string(line) + ": " + e.what());
    }
    return FMV_OK;
  });
}

fmv_status fmv_engine_push_file(fmv_engine* engine, const char* stream_path) {
  if (engine == nullptr) return null_arg("engine");
  if (stream_path == nullptr) return null_arg("stream_path");
  if (engine->engine.finished()) return fail(FMV_ERR_STATE, "push after fmv_engine_finish");
  return guarded([&] {
    std::ifstream in(stream_path);
    if (!in) throw fmv::IoError(std::string("cannot open '") + stream_path + "' for reading");
    fmv::StreamReader reader(in);
    while (auto frame = reader.next()) {
      try {
        engine->engine.push(*frame);
      } catch (const fmv::ValidationError& e) {
        throw fmv::ValidationError("line " + std::to_string(reader.line_number()) + ": " + e.what());
      }
    }
    return FMV_OK;
  });
}

fmv_status fmv_engine_finish(fmv_engine* engine) {
  if (engine == nullptr) return null_arg("engine");
  return guarded([&] {
    engine->engine.finish();
    return FMV_OK;
  });
}

fmv_status fmv_engine_stats(const fmv_engine* engine, fmv_stats* out) {
  if (engine == nullptr) return null_arg("engine");
  if (out == nullptr) return null_arg("out");
  const fmv::PipelineStats& s = engine->engine.stats();
  *out = {s.frames_processed,     s.frames_skipped,       s.cataloging_invocations, s.detections_in,
          s.detections_after_gates, s.detections_after_nms, s.tracks_born,          s.tracks_died,
          s.events_emitted,       s.events_ungeolocated};
  return FMV_OK;
}

fmv_status fmv_engine_event_count(const fmv_engine* engine, size_t* out) {
  if (engine == nullptr) return null_arg("engine");
  if (out == nullptr) return null_arg("out");
  if (const fmv_status s = require_finished(engine); s != FMV_OK) return s;
  *out = engine->engine.events().size();
  return FMV_OK;
}

fmv_status fmv_engine_events_jsonl(const fmv_engine* engine, char** out) {
  if (engine == nullptr) return null_arg("engine");
  if (out == nullptr) return null_arg("out");
  if (const fmv_status s = require_finished(engine); s != FMV_OK) return s;
  return guarded([&] { return give_string(fmv::export_events(engine->engine.events()), out); });
}

fmv_status fmv_engine_cop_geojson(const fmv_engine* engine, char** out) {
  if (engine == nullptr) return null_arg("engine");
  if (out == nullptr) return null_arg("out");
  if (const fmv_status s = require_finished(engine); s != FMV_OK) return s;
  return guarded([&] { return give_string(fmv::export_cop(engine->engine.events()), out); });
}

fmv_status fmv_engine_write_outputs(const fmv_engine* engine, const char* events_path, const char* cop_path) {
  if (engine == nullptr) return null_arg("engine");
  if (const fmv_status s = require_finished(engine); s != FMV_OK) return s;
  return guarded([&] {
    const auto& events = engine->engine.events();
    if (events_path != nullptr) fmv::write_file_atomic(events_path, fmv::export_events(events));
    if (cop_path != nullptr) fmv::write_file_atomic(cop_path, fmv::export_cop(events));
    return FMV_OK;
  });
}

fmv_status fmv_plan_json(const fmv_config* cfg, int width, int height, const char* context_label, char** out) {
  if (cfg == nullptr) return null_arg("cfg");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    nlohmann::ordered_json plans = nlohmann::ordered_json::object();
    for (fmv::ContextLabel label : fmv::kAllContextLabels) {
      if (label == fmv::ContextLabel::uneventful) continue;
      if (context_label != nullptr && fmv::context_label_from_string(context_label) != label) continue;
      const fmv::TilePlan plan = fmv::plan_pyramid(width, height, fmv::select_config(label, cfg->cfg.table));
      nlohmann::ordered_json tiles = nlohmann::ordered_json::array();
      for (const fmv::Tile& t : plan.tiles) {
        tiles.push_back({{"index", t.index},
                         {"origin_x", t.origin_x},
                         {"origin_y", t.origin_y},
                         {"width", t.width},
                         {"height", t.height},
                         {"scale", t.scale}});
      }
      plans[std::string(fmv::to_string(label))] = {{"tile_count", plan.tiles.size()}, {"tiles", tiles}};
    }
    if (context_label != nullptr && context_label == std::string("uneventful")) {
      throw fmv::ValidationError("the uneventful context has no tile plan");
    }
    const nlohmann::ordered_json doc = {{"width", width}, {"height", height}, {"plans", plans}};
    return give_string(doc.dump(2) + "\n", out);
  });
}

fmv_status fmv_simulate_files(const char* scenario_path, const char* noise_path, const uint64_t* seed_override,
                              const char* stream_out, const char* truth_out) {
  if (scenario_path == nullptr) return null_arg("scenario_path");
  if (stream_out == nullptr) return null_arg("stream_out");
  if (truth_out == nullptr) return null_arg("truth_out");
  return guarded([&] {
    const fmv::Scenario scenario = fmv::load_scenario(scenario_path);
    fmv::SimulationResult sim = fmv::simulate(scenario);
    if (noise_path != nullptr || seed_override != nullptr) {
      fmv::NoiseParams noise;
      if (noise_path != nullptr) noise = fmv::parse_noise(fmv::read_text_file(noise_path));
      if (seed_override != nullptr) noise.seed = *seed_override;
      sim.stream = fmv::add_noise(sim.stream, noise);
    }
    fmv::write_file_atomic(stream_out, fmv::serialize_stream(sim.stream));
    fmv::write_file_atomic(truth_out, fmv::serialize_truth(sim.truth));
    return FMV_OK;
  });
}

fmv_status fmv_evaluate_files(const char* pred_path, const char* truth_path, uint64_t tol_frames, char** report_json) {
  if (pred_path == nullptr) return null_arg("pred_path");
  if (truth_path == nullptr) return null_arg("truth_path");
  if (report_json == nullptr) return null_arg("report_json");
  return guarded([&] {
    const auto pred = fmv::parse_events(fmv::read_text_file(pred_path));
    const auto truth = fmv::parse_truth(fmv::read_text_file(truth_path));
    return give_string(fmv::serialize_report(fmv::evaluate(pred, truth, tol_frames)), report_json);
  });
}

}  // extern "C"
