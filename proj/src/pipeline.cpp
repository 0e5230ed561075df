#include "fmvsense/pipeline.hpp"

#include <algorithm>
#include <string>

#include "fmvsense/context.hpp"
#include "fmvsense/error.hpp"
#include "fmvsense/geo.hpp"

namespace fmv {

namespace {

EngineConfig validated(EngineConfig cfg) {
  validate(cfg);
  return cfg;
}

}  // namespace

Engine::Engine(EngineConfig cfg)
    : cfg_(validated(std::move(cfg))),
      tracker_(cfg_.tracker),
      transitions_(cfg_.events),
      debouncer_(cfg_.events) {}

std::vector<Detection> Engine::catalog(const FrameRecord& frame, ContextLabel label) {
  ++stats_.cataloging_invocations;
  const DetectorConfig cfg = resolve_for_frame(select_config(label, cfg_.table), frame.width, frame.height);

  std::vector<Detection> global;
  global.reserve(frame.detections.size());
  for (const Detection& d : frame.detections) {
    if (!d.tile) {
      global.push_back(d);
      continue;
    }
    const auto key = std::make_tuple(label, frame.width, frame.height);
    auto it = plans_.find(key);
    if (it == plans_.end()) it = plans_.emplace(key, plan_pyramid(frame.width, frame.height, cfg)).first;
    const std::vector<Tile>& tiles = it->second.tiles;
    if (static_cast<std::size_t>(*d.tile) >= tiles.size()) {
      throw ValidationError("frame " + std::to_string(frame.frame_id) + ": field 'tile': index " +
                            std::to_string(*d.tile) + " outside the " + std::to_string(tiles.size()) +
                            "-tile plan for '" + std::string(to_string(label)) + "'");
    }
    const Detection mapped = map_tile_to_frame(d, tiles[static_cast<std::size_t>(*d.tile)]);
    if (bbox_intersects_frame(mapped.bbox, frame.width, frame.height)) global.push_back(mapped);
  }

  const std::vector<Detection> gated = apply_gates(global, cfg);
  stats_.detections_after_gates += gated.size();
  std::vector<Detection> merged = nms_merge(gated, cfg_.nms_iou_threshold);
  stats_.detections_after_nms += merged.size();
  return merged;
}

void Engine::push(const FrameRecord& frame) {
  if (finished_) throw ValidationError("push after finish");
  validate(frame);
  if (last_frame_ && frame.frame_id <= *last_frame_) {
    throw ValidationError("field 'frame_id': " + std::to_string(frame.frame_id) + " is not greater than " +
                          std::to_string(*last_frame_));
  }
  last_frame_ = frame.frame_id;
  stats_.detections_in += frame.detections.size();

  const SceneContext ctx = classify_frame(frame, cfg_.thresholds);
  if (!is_actionable(ctx)) {
    ++stats_.frames_skipped;
    return;
  }
  ++stats_.frames_processed;
  meta_[frame.frame_id] = {frame.timestamp_ms, frame.geo, frame.width, frame.height, ctx.label};

  const std::vector<Detection> dets = catalog(frame, ctx.label);
  const StepResult step = tracker_.step(frame.frame_id, dets);
  stats_.tracks_born += step.births.size();
  stats_.tracks_died += step.deaths.size();

  for (const RawTransition& t : transitions_.update(frame.frame_id, tracker_, step)) {
    debouncer_.observe_transition(t);
  }

  std::vector<PersonBox> people;
  for (const Track& t : tracker_.active()) {
    if (t.cls.kind() == ClassKind::person && t.last().frame == frame.frame_id) people.push_back({t.id, t.last().bbox});
  }
  std::vector<RawGroup> groups;
  auto add = [&](EventType type, std::vector<Group> found) {
    for (Group& g : found) {
      BBox anchor;
      bool first = true;
      for (const PersonBox& p : people) {
        if (!std::binary_search(g.begin(), g.end(), p.id)) continue;
        anchor = first ? p.bbox : bbox_union(anchor, p.bbox);
        first = false;
      }
      groups.push_back({type, std::move(g), anchor});
    }
  };
  add(EventType::meeting, detect_meetings(people, cfg_.events));
  add(EventType::crowd, detect_crowds(people, cfg_.events));
  debouncer_.observe_frame(frame.frame_id, groups);
}

const std::vector<Event>& Engine::finish() {
  if (finished_) return *finished_;
  std::vector<Event> events = debouncer_.finish();
  for (Event& e : events) {
    const FrameMeta& start = meta_.at(e.start_frame);
    const FrameMeta& end = meta_.at(e.end_frame);
    e.start_timestamp_ms = start.timestamp_ms;
    e.end_timestamp_ms = end.timestamp_ms;
    e.context_label = start.label;
    if (cfg_.output.geolocate) e = geolocate_event(std::move(e), start.geo, start.width, start.height);
    if (!e.geo) ++stats_.events_ungeolocated;
  }
  stats_.events_emitted = events.size();
  finished_ = std::move(events);
  return *finished_;
}

const std::vector<Event>& Engine::events() const {
  if (!finished_) throw ValidationError("events requested before finish");
  return *finished_;
}

RunResult run_pipeline(std::span<const FrameRecord> stream, const EngineConfig& cfg) {
  Engine engine(cfg);
  for (const FrameRecord& f : stream) engine.push(f);
  RunResult r;
  r.events = engine.finish();
  r.stats = engine.stats();
  return r;
}

}  // namespace fmv
