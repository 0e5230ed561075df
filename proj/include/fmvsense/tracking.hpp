#pragma once

// Tracking-by-detection. Detections of the current frame are associated with
// the most recent box of each live track by class and IoU.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fmvsense/model.hpp"

namespace fmv {

using TrackId = std::uint64_t;
using FrameId = std::uint64_t;

struct Observation {
  FrameId frame = 0;
  BBox bbox;
  double confidence = 0.0;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Track {
  TrackId id = 0;
  ObjectClass cls;
  std::vector<Observation> observations;
  FrameId birth_frame = 0;
  std::optional<FrameId> death_frame;
  int misses = 0;

  const Observation& last() const { return observations.back(); }
  friend bool operator==(const Track&, const Track&) = default;
};

struct TrackerParams {
  double iou_threshold = 0.3;
  int max_misses = 3;
  friend bool operator==(const TrackerParams&, const TrackerParams&) = default;
};

void validate(const TrackerParams& p);

struct Assignment {
  std::vector<std::pair<TrackId, std::size_t>> matches;
  std::vector<TrackId> unmatched_tracks;
  std::vector<std::size_t> unmatched_dets;
};

/// Greedy association in descending IoU order (ties: lower track id, then
/// lower detection index). Pairs must share a class and reach the threshold.
Assignment associate(std::span<const Track> active, std::span<const Detection> dets, double iou_threshold);

struct StepResult {
  std::vector<TrackId> births;
  std::vector<TrackId> deaths;
  /// Track id assigned to each input detection, by index.
  std::vector<TrackId> det_tracks;
};

class Tracker {
 public:
  explicit Tracker(TrackerParams params = {});

  /// Advances by one frame. Throws ValidationError unless frame_id is
  /// strictly greater than the previous one.
  StepResult step(FrameId frame_id, std::span<const Detection> dets);

  const std::vector<Track>& active() const { return active_; }
  const std::vector<Track>& terminated() const { return terminated_; }
  const TrackerParams& params() const { return params_; }
  TrackId next_id() const { return next_id_; }

  /// Searches active then terminated tracks.
  const Track* find(TrackId id) const;

 private:
  TrackerParams params_;
  std::vector<Track> active_;
  std::vector<Track> terminated_;
  TrackId next_id_ = 0;
  std::optional<FrameId> last_frame_;
};

}  // namespace fmv
