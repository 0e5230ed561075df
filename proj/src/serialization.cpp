#include "fmvsense/serialization.hpp"

#include <sstream>

#include "fmvsense/context.hpp"
#include "fmvsense/error.hpp"
#include "fmvsense/file_io.hpp"
#include "json_util.hpp"

namespace fmv {

using detail::json;
using detail::ojson;

namespace {

BBox box_from(const json& v, std::string_view field) {
  const json& a = detail::as_array(v, field, 4);
  return {detail::as_number(a[0], field), detail::as_number(a[1], field), detail::as_number(a[2], field),
          detail::as_number(a[3], field)};
}

ojson box_to(const BBox& b) { return ojson::array({b.x, b.y, b.w, b.h}); }

GeoMeta geo_from(const json& g) {
  detail::as_object(g, "geo");
  detail::only_keys(g, "geo", {"center_lat", "center_lon", "gsd_m_per_px", "heading_deg"});
  GeoMeta m;
  m.center_lat = detail::as_number(detail::require(g, "center_lat"), "center_lat");
  m.center_lon = detail::as_number(detail::require(g, "center_lon"), "center_lon");
  m.gsd_m_per_px = detail::as_number(detail::require(g, "gsd_m_per_px"), "gsd_m_per_px");
  m.heading_deg = detail::number_or(g, "heading_deg", 0.0);
  return m;
}

ojson geo_to(const GeoMeta& g) {
  return {{"center_lat", g.center_lat},
          {"center_lon", g.center_lon},
          {"gsd_m_per_px", g.gsd_m_per_px},
          {"heading_deg", g.heading_deg}};
}

ContextFeatures features_from(const json& f) {
  detail::as_object(f, "features");
  detail::only_keys(f, "features", {"altitude_m", "water_fraction", "clutter_score"});
  ContextFeatures c;
  c.altitude_m = detail::as_number(detail::require(f, "altitude_m"), "altitude_m");
  c.water_fraction = detail::as_number(detail::require(f, "water_fraction"), "water_fraction");
  c.clutter_score = detail::as_number(detail::require(f, "clutter_score"), "clutter_score");
  return c;
}

ojson features_to(const ContextFeatures& f) {
  return {{"altitude_m", f.altitude_m}, {"water_fraction", f.water_fraction}, {"clutter_score", f.clutter_score}};
}

int dimension(const json& v, std::string_view field) {
  const std::int64_t i = detail::as_int(v, field);
  if (i <= 0 || i > 1'000'000) detail::field_error(field, "expected a positive pixel count");
  return static_cast<int>(i);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    out.push_back(text.substr(pos, end - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r") == std::string_view::npos; }

template <class Parse>
auto parse_lines(std::string_view text, Parse&& parse) {
  std::vector<decltype(parse(std::string_view{}))> out;
  std::size_t n = 0;
  for (std::string_view line : split_lines(text)) {
    ++n;
    if (blank(line)) continue;
    try {
      out.push_back(parse(line));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

FrameRecord parse_frame(std::string_view line) {
  const json j = detail::parse_json(line, "frame");
  detail::as_object(j, "frame");
  detail::only_keys(j, "frame",
                    {"frame_id", "timestamp_ms", "width", "height", "geo", "features", "context_logits", "detections"});
  FrameRecord r;
  r.frame_id = detail::as_uint(detail::require(j, "frame_id"), "frame_id");
  r.timestamp_ms = detail::as_int(detail::require(j, "timestamp_ms"), "timestamp_ms");
  r.width = dimension(detail::require(j, "width"), "width");
  r.height = dimension(detail::require(j, "height"), "height");
  if (const json* g = detail::find(j, "geo")) r.geo = geo_from(*g);
  if (const json* f = detail::find(j, "features")) r.features = features_from(*f);
  if (const json* z = detail::find(j, "context_logits")) {
    const json& a = detail::as_array(*z, "context_logits", kContextLabelCount);
    std::array<double, kContextLabelCount> logits{};
    for (std::size_t i = 0; i < kContextLabelCount; ++i) logits[i] = detail::as_number(a[i], "context_logits");
    r.context_logits = logits;
  }
  if (const json* ds = detail::find(j, "detections")) {
    for (const json& d : detail::as_array(*ds, "detections")) {
      detail::as_object(d, "detections");
      detail::only_keys(d, "detection", {"class", "bbox", "confidence", "tile"});
      Detection det;
      det.cls = ObjectClass::from_name(detail::as_string(detail::require(d, "class"), "class"));
      det.bbox = box_from(detail::require(d, "bbox"), "bbox");
      det.confidence = detail::as_number(detail::require(d, "confidence"), "confidence");
      if (const json* t = detail::find(d, "tile")) {
        const std::int64_t idx = detail::as_int(*t, "tile");
        if (idx < 0 || idx > INT32_MAX) detail::field_error("tile", "expected a non-negative index");
        det.tile = static_cast<int>(idx);
      }
      r.detections.push_back(std::move(det));
    }
  }
  validate(r);
  return r;
}

std::string serialize_frame(const FrameRecord& r) {
  ojson j = {{"frame_id", r.frame_id}, {"timestamp_ms", r.timestamp_ms}, {"width", r.width}, {"height", r.height}};
  if (r.geo) j["geo"] = geo_to(*r.geo);
  if (r.features) j["features"] = features_to(*r.features);
  if (r.context_logits) j["context_logits"] = *r.context_logits;
  ojson dets = ojson::array();
  for (const Detection& d : r.detections) {
    ojson o = {{"class", d.cls.name()}, {"bbox", box_to(d.bbox)}, {"confidence", d.confidence}};
    if (d.tile) o["tile"] = *d.tile;
    dets.push_back(std::move(o));
  }
  j["detections"] = std::move(dets);
  return j.dump();
}

std::string serialize_stream(std::span<const FrameRecord> stream) {
  std::string out;
  for (const FrameRecord& r : stream) {
    out += serialize_frame(r);
    out += '\n';
  }
  return out;
}

std::optional<FrameRecord> StreamReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (blank(line)) continue;
    try {
      FrameRecord r = parse_frame(line);
      if (last_frame_ && r.frame_id <= *last_frame_) {
        throw ValidationError("field 'frame_id': " + std::to_string(r.frame_id) + " is not greater than " +
                              std::to_string(*last_frame_));
      }
      last_frame_ = r.frame_id;
      return r;
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_) + ": " + e.what());
    }
  }
  if (in_.bad()) throw IoError("stream read failed at line " + std::to_string(line_ + 1));
  return std::nullopt;
}

std::vector<FrameRecord> parse_stream(std::string_view text) {
  std::istringstream in{std::string(text)};
  StreamReader reader(in);
  std::vector<FrameRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

std::vector<FrameRecord> load_stream(const std::filesystem::path& path) { return parse_stream(read_text_file(path)); }

std::string serialize_event(const Event& e) {
  ojson j = {{"event_id", e.event_id},
             {"type", std::string(to_string(e.type))},
             {"start_frame", e.start_frame},
             {"end_frame", e.end_frame},
             {"start_timestamp_ms", e.start_timestamp_ms},
             {"end_timestamp_ms", e.end_timestamp_ms},
             {"participants", e.participants},
             {"anchor_bbox", box_to(e.anchor_bbox)},
             {"geo", e.geo ? ojson{{"lat", e.geo->lat}, {"lon", e.geo->lon}} : ojson(nullptr)},
             {"context_label", std::string(to_string(e.context_label))}};
  return j.dump();
}

Event parse_event(std::string_view line) {
  const json j = detail::parse_json(line, "event");
  detail::as_object(j, "event");
  Event e;
  e.event_id = detail::as_uint(detail::require(j, "event_id"), "event_id");
  e.type = event_type_from_string(detail::as_string(detail::require(j, "type"), "type"));
  e.start_frame = detail::as_uint(detail::require(j, "start_frame"), "start_frame");
  e.end_frame = detail::as_uint(detail::require(j, "end_frame"), "end_frame");
  if (const json* v = detail::find(j, "start_timestamp_ms")) e.start_timestamp_ms = detail::as_int(*v, "start_timestamp_ms");
  if (const json* v = detail::find(j, "end_timestamp_ms")) e.end_timestamp_ms = detail::as_int(*v, "end_timestamp_ms");
  if (const json* v = detail::find(j, "participants")) {
    for (const json& p : detail::as_array(*v, "participants")) e.participants.push_back(detail::as_uint(p, "participants"));
  }
  if (const json* v = detail::find(j, "anchor_bbox")) e.anchor_bbox = box_from(*v, "anchor_bbox");
  if (const json* g = detail::find(j, "geo")) {
    detail::as_object(*g, "geo");
    e.geo = GeoPoint{detail::as_number(detail::require(*g, "lat"), "lat"),
                     detail::as_number(detail::require(*g, "lon"), "lon")};
  }
  if (const json* v = detail::find(j, "context_label")) {
    e.context_label = context_label_from_string(detail::as_string(*v, "context_label"));
  }
  if (e.end_frame < e.start_frame) detail::field_error("end_frame", "precedes start_frame");
  return e;
}

std::string export_events(std::span<const Event> events) {
  std::string out;
  for (const Event& e : events) {
    out += serialize_event(e);
    out += '\n';
  }
  return out;
}

std::vector<Event> parse_events(std::string_view text) { return parse_lines(text, parse_event); }

std::string export_cop(std::span<const Event> events) {
  ojson features = ojson::array();
  for (const Event& e : events) {
    if (!e.geo) continue;
    features.push_back({{"type", "Feature"},
                        {"id", e.event_id},
                        {"geometry", {{"type", "Point"}, {"coordinates", ojson::array({e.geo->lon, e.geo->lat})}}},
                        {"properties",
                         {{"event_id", e.event_id},
                          {"type", std::string(to_string(e.type))},
                          {"start_frame", e.start_frame},
                          {"end_frame", e.end_frame},
                          {"start_timestamp_ms", e.start_timestamp_ms},
                          {"end_timestamp_ms", e.end_timestamp_ms},
                          {"participants", e.participants},
                          {"context_label", std::string(to_string(e.context_label))}}}});
  }
  const ojson fc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return fc.dump(2) + "\n";
}

std::string serialize_truth(std::span<const TruthRecord> truth) {
  std::string out;
  for (const TruthRecord& t : truth) {
    const ojson j = {{"truth_id", t.truth_id},
                     {"type", std::string(to_string(t.type))},
                     {"trigger_frame", t.trigger_frame},
                     {"end_frame", t.end_frame},
                     {"participants", t.participants}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TruthRecord> parse_truth(std::string_view text) {
  return parse_lines(text, [](std::string_view line) {
    const json j = detail::parse_json(line, "truth");
    detail::as_object(j, "truth");
    TruthRecord t;
    if (const json* v = detail::find(j, "truth_id")) t.truth_id = detail::as_uint(*v, "truth_id");
    t.type = event_type_from_string(detail::as_string(detail::require(j, "type"), "type"));
    t.trigger_frame = detail::as_uint(detail::require(j, "trigger_frame"), "trigger_frame");
    t.end_frame = t.trigger_frame;
    if (const json* v = detail::find(j, "end_frame")) t.end_frame = detail::as_uint(*v, "end_frame");
    if (const json* v = detail::find(j, "participants")) {
      for (const json& p : detail::as_array(*v, "participants")) t.participants.push_back(detail::as_string(p, "participants"));
    }
    return t;
  });
}

namespace {

FrameRange range_from(const json& v, std::string_view field) {
  const json& a = detail::as_array(v, field, 2);
  return {detail::as_uint(a[0], field), detail::as_uint(a[1], field)};
}

Entity entity_from(const json& e) {
  detail::as_object(e, "entities");
  detail::only_keys(e, "entity", {"id", "class", "size", "waypoints", "visible"});
  Entity out;
  out.id = detail::as_string(detail::require(e, "id"), "id");
  out.cls = ObjectClass::from_name(detail::as_string(detail::require(e, "class"), "class"));
  const json& size = detail::as_array(detail::require(e, "size"), "size", 2);
  out.width = detail::as_number(size[0], "size");
  out.height = detail::as_number(size[1], "size");
  for (const json& w : detail::as_array(detail::require(e, "waypoints"), "waypoints")) {
    const json& a = detail::as_array(w, "waypoints", 3);
    out.waypoints.push_back(
        {detail::as_uint(a[0], "waypoints"), detail::as_number(a[1], "waypoints"), detail::as_number(a[2], "waypoints")});
  }
  if (const json* v = detail::find(e, "visible")) {
    for (const json& r : detail::as_array(*v, "visible")) out.visible.push_back(range_from(r, "visible"));
  }
  return out;
}

Activity activity_from(const json& a) {
  detail::as_object(a, "activities");
  detail::only_keys(a, "activity",
                    {"type", "participants", "trigger_frame", "dwell_frames", "location", "spacing_px", "radius_px"});
  Activity out;
  out.type = event_type_from_string(detail::as_string(detail::require(a, "type"), "type"));
  for (const json& p : detail::as_array(detail::require(a, "participants"), "participants")) {
    out.participants.push_back(detail::as_string(p, "participants"));
  }
  out.trigger_frame = detail::as_uint(detail::require(a, "trigger_frame"), "trigger_frame");
  if (const json* v = detail::find(a, "dwell_frames")) out.dwell_frames = static_cast<int>(detail::as_int(*v, "dwell_frames"));
  if (const json* v = detail::find(a, "location")) {
    const json& l = detail::as_array(*v, "location", 2);
    out.location = Point2{detail::as_number(l[0], "location"), detail::as_number(l[1], "location")};
  }
  if (const json* v = detail::find(a, "spacing_px")) out.spacing_px = detail::as_number(*v, "spacing_px");
  if (const json* v = detail::find(a, "radius_px")) out.radius_px = detail::as_number(*v, "radius_px");
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  const json j = detail::parse_json(json_text, "scenario");
  detail::as_object(j, "scenario");
  detail::only_keys(j, "scenario",
                    {"name", "frame_count", "frame_width", "frame_height", "fps", "start_timestamp_ms", "geo", "context",
                     "context_profile", "entities", "activities"});
  Scenario s;
  if (const json* v = detail::find(j, "name")) s.name = detail::as_string(*v, "name");
  s.frame_count = detail::as_uint(detail::require(j, "frame_count"), "frame_count");
  s.frame_width = dimension(detail::require(j, "frame_width"), "frame_width");
  s.frame_height = dimension(detail::require(j, "frame_height"), "frame_height");
  s.fps = detail::number_or(j, "fps", 30.0);
  if (const json* v = detail::find(j, "start_timestamp_ms")) s.start_timestamp_ms = detail::as_int(*v, "start_timestamp_ms");
  if (const json* g = detail::find(j, "geo")) s.geo = geo_from(*g);

  const json* constant = detail::find(j, "context");
  const json* profile = detail::find(j, "context_profile");
  if ((constant == nullptr) == (profile == nullptr)) {
    throw ValidationError("scenario needs exactly one of 'context' or 'context_profile'");
  }
  if (constant != nullptr) {
    s.context_profile.push_back({{0, s.frame_count == 0 ? 0 : s.frame_count - 1}, features_from(*constant)});
  } else {
    for (const json& seg : detail::as_array(*profile, "context_profile")) {
      detail::as_object(seg, "context_profile");
      detail::only_keys(seg, "context segment", {"frames", "features"});
      s.context_profile.push_back(
          {range_from(detail::require(seg, "frames"), "frames"), features_from(detail::require(seg, "features"))});
    }
  }

  if (const json* es = detail::find(j, "entities")) {
    for (const json& e : detail::as_array(*es, "entities")) s.entities.push_back(entity_from(e));
  }
  if (const json* as = detail::find(j, "activities")) {
    for (const json& a : detail::as_array(*as, "activities")) s.activities.push_back(activity_from(a));
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_text_file(path)); }

NoiseParams parse_noise(std::string_view json_text) {
  const json j = detail::parse_json(json_text, "noise");
  detail::as_object(j, "noise");
  detail::only_keys(j, "noise", {"jitter_sigma_px", "drop_prob", "false_positive_rate", "confidence_sigma", "seed"});
  NoiseParams n;
  n.jitter_sigma_px = detail::number_or(j, "jitter_sigma_px", 0.0);
  n.drop_prob = detail::number_or(j, "drop_prob", 0.0);
  n.false_positive_rate = detail::number_or(j, "false_positive_rate", 0.0);
  n.confidence_sigma = detail::number_or(j, "confidence_sigma", 0.0);
  if (const json* v = detail::find(j, "seed")) n.seed = detail::as_uint(*v, "seed");
  validate(n);
  return n;
}

}  // namespace fmv
