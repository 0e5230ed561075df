#pragma once

// Engine configuration. The file is one JSON document with the sections
// context, detector, tracker, events and output. Any field may be omitted and
// takes its default; unknown keys are rejected. Gates are merged per class,
// and setting a class gate to null removes it.

#include <filesystem>
#include <string>
#include <string_view>

#include "fmvsense/context.hpp"
#include "fmvsense/events.hpp"
#include "fmvsense/tracking.hpp"

namespace fmv {

struct OutputOptions {
  bool geolocate = true;
};

struct EngineConfig {
  ReferenceThresholds thresholds;
  ContextConfigTable table = default_context_table();
  double nms_iou_threshold = 0.5;
  TrackerParams tracker;
  EventParams events;
  OutputOptions output;
};

void validate(const EngineConfig& cfg);

/// Parses a config document layered over the defaults, then validates it.
EngineConfig parse_config(std::string_view json_text);
EngineConfig load_config(const std::filesystem::path& path);
/// Full document, every default spelled out.
std::string serialize_config(const EngineConfig& cfg);

}  // namespace fmv
