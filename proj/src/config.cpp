#include "fmvsense/config.hpp"

#include "fmvsense/error.hpp"
#include "fmvsense/file_io.hpp"
#include "json_util.hpp"

namespace fmv {

using detail::json;
using detail::ojson;

void validate(const EngineConfig& cfg) {
  validate(cfg.thresholds);
  validate(cfg.table);
  if (!std::isfinite(cfg.nms_iou_threshold) || cfg.nms_iou_threshold < 0.0 || cfg.nms_iou_threshold > 1.0)
    throw ValidationError("field 'nms_iou_threshold' outside [0,1]");
  validate(cfg.tracker);
  validate(cfg.events);
}

namespace {

ojson opt_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson detector_to_json(const DetectorConfig& d) {
  ojson gates = ojson::object();
  for (const auto& [cls, g] : d.class_gates) {
    gates[cls.name()] = {{"min_confidence", g.min_confidence},
                         {"min_area_px2", g.min_area_px2},
                         {"max_area_px2", opt_number(g.max_area_px2)},
                         {"max_area_frame_frac", opt_number(g.max_area_frame_frac)}};
  }
  return {{"scales", d.scales}, {"tile_size", d.tile_size}, {"overlap_frac", d.overlap_frac}, {"class_gates", gates}};
}

ojson to_json(const EngineConfig& c) {
  ojson per_context = ojson::object();
  for (const auto& [label, d] : c.table) per_context[std::string(to_string(label))] = detector_to_json(d);
  const EventParams& e = c.events;
  return {
      {"context",
       {{"uneventful_clutter_below", c.thresholds.uneventful_clutter_below},
        {"water_fraction_min", c.thresholds.water_fraction_min},
        {"high_altitude_min_m", c.thresholds.high_altitude_min_m},
        {"medium_altitude_min_m", c.thresholds.medium_altitude_min_m}}},
      {"detector", {{"nms_iou_threshold", c.nms_iou_threshold}, {"per_context", per_context}}},
      {"tracker", {{"iou_threshold", c.tracker.iou_threshold}, {"max_misses", c.tracker.max_misses}}},
      {"events",
       {{"meeting_k", e.meeting_k},
        {"crowd_min_count", e.crowd_min_count},
        {"crowd_radius_k", e.crowd_radius_k},
        {"interaction_iou", e.interaction_iou},
        {"new_track_age", e.new_track_age},
        {"debounce_frames", e.debounce_frames},
        {"cooldown_frames", e.cooldown_frames}}},
      {"output", {{"geolocate", c.output.geolocate}}},
  };
}

std::optional<double> opt(const json& obj, std::string_view key) {
  const json* v = detail::find(obj, key);
  if (v == nullptr) return std::nullopt;
  return detail::as_number(*v, key);
}

int as_int32(const json& v, std::string_view field) {
  const std::int64_t i = detail::as_int(v, field);
  if (i < INT32_MIN || i > INT32_MAX) detail::field_error(field, "out of range");
  return static_cast<int>(i);
}

DetectorConfig detector_from_json(const json& j, std::string_view where) {
  detail::only_keys(j, where, {"scales", "tile_size", "overlap_frac", "class_gates"});
  DetectorConfig d;
  d.scales.clear();
  for (const json& s : detail::as_array(detail::require(j, "scales"), "scales")) {
    d.scales.push_back(detail::as_number(s, "scales"));
  }
  d.tile_size = as_int32(detail::require(j, "tile_size"), "tile_size");
  d.overlap_frac = detail::as_number(detail::require(j, "overlap_frac"), "overlap_frac");
  if (const json* gates = detail::find(j, "class_gates")) {
    for (const auto& [name, g] : detail::as_object(*gates, "class_gates").items()) {
      if (g.is_null()) continue;
      detail::as_object(g, name);
      detail::only_keys(g, "gate '" + name + "'",
                        {"min_confidence", "min_area_px2", "max_area_px2", "max_area_frame_frac"});
      ClassGate gate;
      gate.min_confidence = detail::number_or(g, "min_confidence", 0.0);
      gate.min_area_px2 = detail::number_or(g, "min_area_px2", 0.0);
      gate.max_area_px2 = opt(g, "max_area_px2");
      gate.max_area_frame_frac = opt(g, "max_area_frame_frac");
      d.class_gates[ObjectClass::from_name(name)] = gate;
    }
  }
  return d;
}

EngineConfig from_json(const json& j) {
  detail::only_keys(j, "config", {"context", "detector", "tracker", "events", "output"});
  EngineConfig c;

  const json& ctx = detail::as_object(detail::require(j, "context"), "context");
  detail::only_keys(ctx, "context",
                    {"uneventful_clutter_below", "water_fraction_min", "high_altitude_min_m", "medium_altitude_min_m"});
  c.thresholds.uneventful_clutter_below = detail::number_or(ctx, "uneventful_clutter_below", 0.1);
  c.thresholds.water_fraction_min = detail::number_or(ctx, "water_fraction_min", 0.5);
  c.thresholds.high_altitude_min_m = detail::number_or(ctx, "high_altitude_min_m", 3000.0);
  c.thresholds.medium_altitude_min_m = detail::number_or(ctx, "medium_altitude_min_m", 1000.0);

  const json& det = detail::as_object(detail::require(j, "detector"), "detector");
  detail::only_keys(det, "detector", {"nms_iou_threshold", "per_context"});
  c.nms_iou_threshold = detail::number_or(det, "nms_iou_threshold", 0.5);
  c.table.clear();
  if (const json* per = detail::find(det, "per_context")) {
    for (const auto& [name, d] : detail::as_object(*per, "per_context").items()) {
      if (d.is_null()) continue;
      const ContextLabel label = context_label_from_string(name);
      c.table[label] = detector_from_json(detail::as_object(d, name), "detector '" + name + "'");
    }
  }

  const json& tr = detail::as_object(detail::require(j, "tracker"), "tracker");
  detail::only_keys(tr, "tracker", {"iou_threshold", "max_misses"});
  c.tracker.iou_threshold = detail::number_or(tr, "iou_threshold", 0.3);
  if (const json* v = detail::find(tr, "max_misses")) c.tracker.max_misses = as_int32(*v, "max_misses");

  const json& ev = detail::as_object(detail::require(j, "events"), "events");
  detail::only_keys(ev, "events",
                    {"meeting_k", "crowd_min_count", "crowd_radius_k", "interaction_iou", "new_track_age",
                     "debounce_frames", "cooldown_frames"});
  EventParams& e = c.events;
  e.meeting_k = detail::number_or(ev, "meeting_k", e.meeting_k);
  e.crowd_radius_k = detail::number_or(ev, "crowd_radius_k", e.crowd_radius_k);
  e.interaction_iou = detail::number_or(ev, "interaction_iou", e.interaction_iou);
  if (const json* v = detail::find(ev, "crowd_min_count")) e.crowd_min_count = as_int32(*v, "crowd_min_count");
  if (const json* v = detail::find(ev, "new_track_age")) e.new_track_age = as_int32(*v, "new_track_age");
  if (const json* v = detail::find(ev, "debounce_frames")) e.debounce_frames = as_int32(*v, "debounce_frames");
  if (const json* v = detail::find(ev, "cooldown_frames")) e.cooldown_frames = as_int32(*v, "cooldown_frames");

  const json& out = detail::as_object(detail::require(j, "output"), "output");
  detail::only_keys(out, "output", {"geolocate"});
  if (const json* v = detail::find(out, "geolocate")) c.output.geolocate = detail::as_bool(*v, "geolocate");
  return c;
}

}  // namespace

EngineConfig parse_config(std::string_view json_text) {
  const json user = detail::parse_json(json_text, "config");
  if (!user.is_object()) throw ValidationError("config: expected a JSON object");
  json merged = json::parse(to_json(EngineConfig{}).dump());
  merged.merge_patch(user);
  EngineConfig c = from_json(merged);
  validate(c);
  return c;
}

EngineConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

std::string serialize_config(const EngineConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace fmv
