#pragma once

// Per-frame pipeline: classify context -> skip uneventful frames -> select
// the detector configuration -> map tile-local detections -> gate -> NMS ->
// track -> event rules -> debounce. Events are geolocated when the stream is
// finished.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "fmvsense/cataloging.hpp"
#include "fmvsense/config.hpp"
#include "fmvsense/events.hpp"
#include "fmvsense/tracking.hpp"

namespace fmv {

struct PipelineStats {
  std::uint64_t frames_processed = 0;
  std::uint64_t frames_skipped = 0;
  std::uint64_t cataloging_invocations = 0;
  std::uint64_t detections_in = 0;
  std::uint64_t detections_after_gates = 0;
  std::uint64_t detections_after_nms = 0;
  std::uint64_t tracks_born = 0;
  std::uint64_t tracks_died = 0;
  std::uint64_t events_emitted = 0;
  std::uint64_t events_ungeolocated = 0;
  friend bool operator==(const PipelineStats&, const PipelineStats&) = default;
};

class Engine {
 public:
  /// Validates the configuration.
  explicit Engine(EngineConfig cfg);

  /// Processes one frame. Throws ValidationError for invalid frames, a
  /// frame_id not above the previous one, or a push after finish().
  void push(const FrameRecord& frame);

  /// Closes open events and returns every event ordered by id. Later calls
  /// return the same list.
  const std::vector<Event>& finish();
  bool finished() const { return finished_.has_value(); }
  /// The finished event list. Throws ValidationError before finish().
  const std::vector<Event>& events() const;

  const PipelineStats& stats() const { return stats_; }
  const Tracker& tracker() const { return tracker_; }
  const EngineConfig& config() const { return cfg_; }

 private:
  struct FrameMeta {
    std::int64_t timestamp_ms = 0;
    std::optional<GeoMeta> geo;
    int width = 0;
    int height = 0;
    ContextLabel label = ContextLabel::uneventful;
  };

  std::vector<Detection> catalog(const FrameRecord& frame, ContextLabel label);

  EngineConfig cfg_;
  Tracker tracker_;
  TransitionDetector transitions_;
  Debouncer debouncer_;
  PipelineStats stats_;
  std::map<FrameId, FrameMeta> meta_;
  std::map<std::tuple<ContextLabel, int, int>, TilePlan> plans_;
  std::optional<FrameId> last_frame_;
  std::optional<std::vector<Event>> finished_;
};

struct RunResult {
  std::vector<Event> events;
  PipelineStats stats;
};

RunResult run_pipeline(std::span<const FrameRecord> stream, const EngineConfig& cfg);

}  // namespace fmv
