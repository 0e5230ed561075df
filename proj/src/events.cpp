#include "fmvsense/events.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fmvsense/error.hpp"

namespace fmv {

namespace {

constexpr std::string_view kEventNames[] = {"meeting",      "crowd",        "enter_vehicle",
                                            "exit_vehicle", "board_vessel", "disembark_vessel"};

bool is_container(ClassKind k) { return k == ClassKind::vehicle || k == ClassKind::vessel; }

}  // namespace

std::string_view to_string(EventType type) { return kEventNames[static_cast<std::size_t>(type)]; }

EventType event_type_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kEventNames); ++i) {
    if (name == kEventNames[i]) return static_cast<EventType>(i);
  }
  throw ValidationError("unknown event type '" + std::string(name) + "'");
}

bool is_transition(EventType type) { return type != EventType::meeting && type != EventType::crowd; }

void validate(const EventParams& p) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.meeting_k)) throw ValidationError("field 'meeting_k' must be > 0");
  if (p.crowd_min_count < 2) throw ValidationError("field 'crowd_min_count' must be >= 2");
  if (!positive(p.crowd_radius_k)) throw ValidationError("field 'crowd_radius_k' must be > 0");
  if (!std::isfinite(p.interaction_iou) || p.interaction_iou < 0.0 || p.interaction_iou > 1.0)
    throw ValidationError("field 'interaction_iou' outside [0,1]");
  if (p.new_track_age < 0) throw ValidationError("field 'new_track_age' must be >= 0");
  if (p.debounce_frames < 1) throw ValidationError("field 'debounce_frames' must be >= 1");
  if (p.cooldown_frames < 0) throw ValidationError("field 'cooldown_frames' must be >= 0");
}

double jaccard(const Group& a, const Group& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<TrackId> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  const double inter = static_cast<double>(both.size());
  return inter / (static_cast<double>(a.size() + b.size()) - inter);
}

std::vector<Group> detect_meetings(std::span<const PersonBox> people, const EventParams& p) {
  const std::size_t n = people.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const BBox& a = people[i].bbox;
      const BBox& b = people[j].bbox;
      const Point2 ca = bbox_center(a);
      const Point2 cb = bbox_center(b);
      const double reach = p.meeting_k * 0.5 * (bbox_diagonal(a) + bbox_diagonal(b));
      const bool close = iou(a, b) > 0.0 || std::hypot(ca.x - cb.x, ca.y - cb.y) <= reach;
      if (close) parent[root(i)] = root(j);
    }
  }

  std::map<std::size_t, Group> components;
  for (std::size_t i = 0; i < n; ++i) components[root(i)].push_back(people[i].id);
  std::vector<Group> out;
  for (auto& [r, g] : components) {
    if (g.size() < 2) continue;
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// One centroid pass; returns members and appends the rest to `excluded`.
Group crowd_pass(std::span<const PersonBox> people, const EventParams& p, std::vector<PersonBox>& excluded) {
  if (people.empty()) return {};
  double cx = 0.0, cy = 0.0, diag = 0.0;
  for (const PersonBox& pb : people) {
    const Point2 c = bbox_center(pb.bbox);
    cx += c.x;
    cy += c.y;
    diag += bbox_diagonal(pb.bbox);
  }
  const double n = static_cast<double>(people.size());
  cx /= n;
  cy /= n;
  const double radius = p.crowd_radius_k * diag / n;

  Group members;
  for (const PersonBox& pb : people) {
    const Point2 c = bbox_center(pb.bbox);
    if (std::hypot(c.x - cx, c.y - cy) <= radius) {
      members.push_back(pb.id);
    } else {
      excluded.push_back(pb);
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace

std::vector<Group> detect_crowds(std::span<const PersonBox> people, const EventParams& p) {
  std::vector<Group> out;
  std::vector<PersonBox> excluded;
  Group first = crowd_pass(people, p, excluded);
  if (static_cast<int>(first.size()) >= p.crowd_min_count) out.push_back(std::move(first));
  if (!excluded.empty() && excluded.size() < people.size() &&
      static_cast<int>(excluded.size()) >= p.crowd_min_count) {
    std::vector<PersonBox> ignored;
    Group second = crowd_pass(excluded, p, ignored);
    if (static_cast<int>(second.size()) >= p.crowd_min_count) out.push_back(std::move(second));
  }
  return out;
}

bool interacts(const BBox& person, const BBox& container, double min_iou) {
  return iou(person, container) >= min_iou || bbox_contains(container, bbox_center(person));
}

TransitionDetector::TransitionDetector(EventParams params) : params_(params) { validate(params_); }

namespace {

template <class Map>
std::optional<std::pair<TrackId, typename Map::mapped_type>> best_interaction(const Map& m, auto&& eligible) {
  std::optional<std::pair<TrackId, typename Map::mapped_type>> best;
  for (const auto& [id, in] : m) {
    if (!eligible(in)) continue;
    // Map iteration is by ascending id, so strict > keeps the lowest id on ties.
    if (!best || in.iou > best->second.iou) best = {id, in};
  }
  return best;
}

}  // namespace

std::vector<RawTransition> TransitionDetector::update(FrameId frame, const Tracker& tracker, const StepResult& step) {
  std::vector<const Track*> containers;
  for (const Track& t : tracker.active()) {
    if (is_container(t.cls.kind())) containers.push_back(&t);
  }

  std::vector<RawTransition> out;
  for (const Track& person : tracker.active()) {
    if (person.cls.kind() != ClassKind::person || person.last().frame != frame) continue;
    PersonState& st = persons_[person.id];
    const BBox& pbox = person.last().bbox;

    std::map<TrackId, Interaction> now;
    for (const Track* c : containers) {
      const BBox& cbox = c->last().bbox;
      if (!interacts(pbox, cbox, params_.interaction_iou)) continue;
      const auto prev = st.current.find(c->id);
      const FrameId run_start = prev != st.current.end() ? prev->second.run_start : frame;
      now[c->id] = {run_start, iou(pbox, cbox), cbox, c->cls.kind()};
    }
    st.current = std::move(now);
    st.last_observed = frame;
    if (person.birth_frame == frame) st.at_birth = st.current;

    if (st.exit_resolved || frame == person.birth_frame) continue;
    if (frame - person.birth_frame > static_cast<FrameId>(params_.new_track_age)) {
      st.exit_resolved = true;
      continue;
    }
    st.exit_resolved = true;
    const auto best = best_interaction(st.at_birth, [](const Interaction&) { return true; });
    if (!best) continue;
    const Interaction& in = best->second;
    RawTransition t;
    t.type = in.container_kind == ClassKind::vessel ? EventType::disembark_vessel : EventType::exit_vehicle;
    t.person = person.id;
    t.container = best->first;
    t.start_frame = person.birth_frame;
    t.end_frame = frame;
    t.anchor = bbox_union(person.observations.front().bbox, in.container_box);
    out.push_back(t);
  }

  for (TrackId dead : step.deaths) {
    const Track* person = tracker.find(dead);
    if (person == nullptr || person->cls.kind() != ClassKind::person) continue;
    const auto it = persons_.find(dead);
    if (it == persons_.end()) continue;
    const PersonState st = std::move(it->second);
    persons_.erase(it);

    const auto best = best_interaction(st.current, [&](const Interaction& in) {
      return in.run_start >= person->birth_frame + static_cast<FrameId>(params_.new_track_age);
    });
    if (!best) continue;
    const Interaction& in = best->second;
    RawTransition t;
    t.type = in.container_kind == ClassKind::vessel ? EventType::board_vessel : EventType::enter_vehicle;
    t.person = dead;
    t.container = best->first;
    t.start_frame = st.last_observed;
    t.end_frame = frame;
    t.anchor = bbox_union(person->last().bbox, in.container_box);
    out.push_back(t);
  }
  return out;
}

Debouncer::Debouncer(EventParams params) : params_(params) { validate(params_); }

void Debouncer::close(const Candidate& c) {
  Event e;
  e.event_id = c.id;
  e.type = c.type;
  e.start_frame = c.first;
  e.end_frame = c.last;
  e.participants = c.participants;
  e.anchor_bbox = c.anchor;
  done_.push_back(std::move(e));
}

void Debouncer::observe_frame(FrameId frame, std::span<const RawGroup> groups) {
  const auto cooldown = static_cast<FrameId>(params_.cooldown_frames);
  std::vector<bool> matched(open_.size(), false);

  for (const RawGroup& g : groups) {
    std::optional<std::size_t> best;
    double best_j = 0.0;
    for (std::size_t i = 0; i < open_.size(); ++i) {
      const Candidate& c = open_[i];
      if (matched[i] || c.type != g.type) continue;
      const bool live = prev_frame_ && c.last == *prev_frame_;
      if (!live && !(c.confirmed && frame - c.last <= cooldown)) continue;
      const double j = jaccard(c.key, g.members);
      if (j >= 0.5 && j > best_j) {
        best = i;
        best_j = j;
      }
    }

    if (best) {
      Candidate& c = open_[*best];
      matched[*best] = true;
      c.key = g.members;
      c.last = frame;
      ++c.hits;
      if (!c.confirmed && c.hits >= params_.debounce_frames) {
        c.confirmed = true;
        c.id = next_id_++;
        c.participants = g.members;
      }
    } else {
      Candidate c;
      c.type = g.type;
      c.key = g.members;
      c.first = c.last = frame;
      c.hits = 1;
      c.anchor = g.anchor;
      if (params_.debounce_frames <= 1) {
        c.confirmed = true;
        c.id = next_id_++;
        c.participants = g.members;
      }
      open_.push_back(std::move(c));
      matched.push_back(true);
    }
  }

  std::vector<Candidate> keep;
  for (std::size_t i = 0; i < open_.size(); ++i) {
    Candidate& c = open_[i];
    if (matched[i]) {
      keep.push_back(std::move(c));
    } else if (c.confirmed) {
      if (frame - c.last > cooldown) {
        close(c);
      } else {
        keep.push_back(std::move(c));
      }
    }
    // Unconfirmed groups that missed a frame are dropped.
  }
  open_ = std::move(keep);
  prev_frame_ = frame;
}

void Debouncer::observe_transition(const RawTransition& t) {
  const auto key = std::make_pair(t.type, t.person);
  const auto it = last_transition_.find(key);
  if (it != last_transition_.end() && t.start_frame - it->second <= static_cast<FrameId>(params_.cooldown_frames)) {
    return;
  }
  last_transition_[key] = t.start_frame;

  Event e;
  e.event_id = next_id_++;
  e.type = t.type;
  e.start_frame = t.start_frame;
  e.end_frame = t.end_frame;
  e.participants = {t.person, t.container};
  std::sort(e.participants.begin(), e.participants.end());
  e.anchor_bbox = t.anchor;
  done_.push_back(std::move(e));
}

std::vector<Event> Debouncer::finish() {
  for (const Candidate& c : open_) {
    if (c.confirmed) close(c);
  }
  open_.clear();
  std::vector<Event> out = std::move(done_);
  done_.clear();
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) { return a.event_id < b.event_id; });
  return out;
}

}  // namespace fmv
