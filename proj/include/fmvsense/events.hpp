#pragma once

// Salient event rules over tracks and per-frame boxes.
//
// Group events (meeting, crowd) are evaluated per frame over the person
// tracks observed in that frame and must persist before they are confirmed.
// Transition events (entering or leaving a vehicle or vessel) are decided
// from track births and deaths and fire once.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fmvsense/context.hpp"
#include "fmvsense/model.hpp"
#include "fmvsense/tracking.hpp"

namespace fmv {

enum class EventType : std::uint8_t { meeting, crowd, enter_vehicle, exit_vehicle, board_vessel, disembark_vessel };

inline constexpr std::array<EventType, 6> kAllEventTypes = {
    EventType::meeting,       EventType::crowd,        EventType::enter_vehicle,
    EventType::exit_vehicle,  EventType::board_vessel, EventType::disembark_vessel};

std::string_view to_string(EventType type);
/// Throws ValidationError for an unknown name.
EventType event_type_from_string(std::string_view name);
bool is_transition(EventType type);

using EventId = std::uint64_t;

struct Event {
  EventId event_id = 0;
  EventType type = EventType::meeting;
  FrameId start_frame = 0;
  FrameId end_frame = 0;
  std::int64_t start_timestamp_ms = 0;
  std::int64_t end_timestamp_ms = 0;
  /// Sorted ascending.
  std::vector<TrackId> participants;
  /// Union of the participants' boxes at start_frame.
  BBox anchor_bbox;
  std::optional<GeoPoint> geo;
  ContextLabel context_label = ContextLabel::low_altitude;
  friend bool operator==(const Event&, const Event&) = default;
};

struct EventParams {
  /// Proximity multiplier on the mean box diagonal for meetings.
  double meeting_k = 1.0;
  int crowd_min_count = 5;
  /// Crowd radius multiplier on the mean person diagonal.
  double crowd_radius_k = 2.0;
  double interaction_iou = 0.1;
  int new_track_age = 2;
  int debounce_frames = 3;
  int cooldown_frames = 30;
  friend bool operator==(const EventParams&, const EventParams&) = default;
};

void validate(const EventParams& p);

struct PersonBox {
  TrackId id = 0;
  BBox bbox;
};

/// Sorted track ids.
using Group = std::vector<TrackId>;

/// Connected components (size >= 2) of the graph linking two persons whose
/// boxes overlap or whose centers are within meeting_k * mean diagonal.
std::vector<Group> detect_meetings(std::span<const PersonBox> people, const EventParams& p);

/// Persons within crowd_radius_k * mean diagonal of the centroid of all
/// person centers; fires at crowd_min_count members. The excluded persons
/// get one more pass to catch a second cluster.
std::vector<Group> detect_crowds(std::span<const PersonBox> people, const EventParams& p);

/// Person/container interaction: IoU at least `min_iou`, or the person's
/// center inside the container box.
bool interacts(const BBox& person, const BBox& container, double min_iou);

struct RawTransition {
  EventType type = EventType::enter_vehicle;
  TrackId person = 0;
  TrackId container = 0;
  FrameId start_frame = 0;
  FrameId end_frame = 0;
  BBox anchor;
};

/// Keeps the person/container interaction history needed by the transition
/// rules:
///  - enter/board: a person track dies while its last observed box interacts
///    with a container, and the interaction began at least new_track_age
///    frames after the track was born (it was not interacting before).
///  - exit/disembark: a person track born interacting with a container is
///    observed again within new_track_age frames of its birth.
class TransitionDetector {
 public:
  explicit TransitionDetector(EventParams params);

  /// Call once per processed frame, right after Tracker::step.
  std::vector<RawTransition> update(FrameId frame, const Tracker& tracker, const StepResult& step);

 private:
  struct Interaction {
    FrameId run_start = 0;
    double iou = 0.0;
    BBox container_box;
    ClassKind container_kind = ClassKind::vehicle;
  };
  struct PersonState {
    FrameId last_observed = 0;
    std::map<TrackId, Interaction> current;
    std::map<TrackId, Interaction> at_birth;
    bool exit_resolved = false;
  };

  EventParams params_;
  std::map<TrackId, PersonState> persons_;
};

struct RawGroup {
  EventType type = EventType::meeting;
  Group members;
  BBox anchor;
};

/// Turns raw per-frame firings into confirmed events.
///
/// A group must be seen on debounce_frames consecutive processed frames to be
/// confirmed. Groups are keyed by type and a participant Jaccard overlap of at
/// least 0.5. Once a confirmed group stops firing it cools down; if its key
/// fires again within cooldown_frames the same event is extended. Transitions
/// are emitted immediately unless the same (type, person) fired within
/// cooldown_frames.
///
/// Emitted events carry frames, participants and the anchor box; timestamps,
/// context and geolocation are filled in by the caller.
class Debouncer {
 public:
  explicit Debouncer(EventParams params);

  /// Call once per processed frame, with every raw group of that frame.
  void observe_frame(FrameId frame, std::span<const RawGroup> groups);
  void observe_transition(const RawTransition& t);
  /// Closes every confirmed group and returns all events ordered by id.
  std::vector<Event> finish();

  std::size_t emitted() const { return done_.size(); }

 private:
  struct Candidate {
    EventType type = EventType::meeting;
    Group key;
    Group participants;
    FrameId first = 0;
    FrameId last = 0;
    int hits = 0;
    bool confirmed = false;
    EventId id = 0;
    BBox anchor;
  };

  void close(const Candidate& c);

  EventParams params_;
  std::vector<Candidate> open_;
  std::map<std::pair<EventType, TrackId>, FrameId> last_transition_;
  std::vector<Event> done_;
  std::optional<FrameId> prev_frame_;
  EventId next_id_ = 1;
};

/// |a ∩ b| / |a ∪ b| over sorted id sets; 0 when both are empty.
double jaccard(const Group& a, const Group& b);

}  // namespace fmv
