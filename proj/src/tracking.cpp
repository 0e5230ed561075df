#include "fmvsense/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "fmvsense/error.hpp"

namespace fmv {

void validate(const TrackerParams& p) {
  if (!std::isfinite(p.iou_threshold) || p.iou_threshold < 0.0 || p.iou_threshold > 1.0)
    throw ValidationError("field 'iou_threshold' outside [0,1]");
  if (p.max_misses < 0) throw ValidationError("field 'max_misses' must be >= 0");
}

Assignment associate(std::span<const Track> active, std::span<const Detection> dets, double iou_threshold) {
  struct Candidate {
    double iou;
    TrackId track;
    std::size_t det;
  };
  std::vector<Candidate> candidates;
  for (const Track& t : active) {
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (dets[j].cls != t.cls) continue;
      const double v = iou(t.last().bbox, dets[j].bbox);
      if (v >= iou_threshold) candidates.push_back({v, t.id, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.iou, a.track, a.det) < std::tie(a.iou, b.track, b.det);
  });

  Assignment out;
  std::vector<TrackId> used_tracks;
  std::vector<bool> used_dets(dets.size(), false);
  for (const Candidate& c : candidates) {
    if (used_dets[c.det]) continue;
    if (std::find(used_tracks.begin(), used_tracks.end(), c.track) != used_tracks.end()) continue;
    used_dets[c.det] = true;
    used_tracks.push_back(c.track);
    out.matches.emplace_back(c.track, c.det);
  }
  for (const Track& t : active) {
    if (std::find(used_tracks.begin(), used_tracks.end(), t.id) == used_tracks.end())
      out.unmatched_tracks.push_back(t.id);
  }
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (!used_dets[j]) out.unmatched_dets.push_back(j);
  }
  return out;
}

Tracker::Tracker(TrackerParams params) : params_(params) { validate(params_); }

StepResult Tracker::step(FrameId frame_id, std::span<const Detection> dets) {
  if (last_frame_ && frame_id <= *last_frame_) {
    throw ValidationError("tracker frame_id " + std::to_string(frame_id) + " is not after " +
                          std::to_string(*last_frame_));
  }
  last_frame_ = frame_id;

  const Assignment a = associate(active_, dets, params_.iou_threshold);
  StepResult result;
  result.det_tracks.resize(dets.size());

  auto find_active = [this](TrackId id) {
    return std::find_if(active_.begin(), active_.end(), [id](const Track& t) { return t.id == id; });
  };
  for (const auto& [track_id, det] : a.matches) {
    Track& t = *find_active(track_id);
    t.observations.push_back({frame_id, dets[det].bbox, dets[det].confidence});
    t.misses = 0;
    result.det_tracks[det] = track_id;
  }
  for (TrackId id : a.unmatched_tracks) {
    Track& t = *find_active(id);
    ++t.misses;
    if (t.misses > params_.max_misses) {
      t.death_frame = frame_id;
      result.deaths.push_back(id);
    }
  }
  // Terminated tracks leave the active list in id order.
  for (auto it = active_.begin(); it != active_.end();) {
    if (it->death_frame) {
      terminated_.push_back(std::move(*it));
      it = active_.erase(it);
    } else {
      ++it;
    }
  }
  for (std::size_t j : a.unmatched_dets) {
    Track t;
    t.id = next_id_++;
    t.cls = dets[j].cls;
    t.observations.push_back({frame_id, dets[j].bbox, dets[j].confidence});
    t.birth_frame = frame_id;
    result.births.push_back(t.id);
    result.det_tracks[j] = t.id;
    active_.push_back(std::move(t));
  }
  return result;
}

const Track* Tracker::find(TrackId id) const {
  for (const auto* list : {&active_, &terminated_}) {
    for (const Track& t : *list) {
      if (t.id == id) return &t;
    }
  }
  return nullptr;
}

}  // namespace fmv
