#include "fmvsense/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "fmvsense/error.hpp"

namespace fmv {

int Activity::dwell() const {
  if (dwell_frames) return *dwell_frames;
  return is_transition(type) ? 5 : 30;
}

namespace {

ClassKind container_kind_for(EventType t) {
  return (t == EventType::board_vessel || t == EventType::disembark_vessel) ? ClassKind::vessel
                                                                            : ClassKind::vehicle;
}

const Entity* find_entity(const std::vector<Entity>& es, const std::string& id) {
  for (const Entity& e : es) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

Entity* find_entity(std::vector<Entity>& es, const std::string& id) {
  for (Entity& e : es) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

}  // namespace

void validate(const Scenario& s) {
  std::vector<std::string> errs;
  auto fail = [&](const std::string& m) { errs.push_back(m); };

  if (s.frame_width <= 0 || s.frame_height <= 0) fail("frame dimensions must be > 0");
  if (!(s.fps > 0.0) || !std::isfinite(s.fps)) fail("fps must be > 0");
  if (s.geo) {
    try {
      validate(*s.geo);
    } catch (const ValidationError& e) {
      fail(std::string("geo: ") + e.what());
    }
  }

  std::vector<bool> covered(s.frame_count, false);
  for (const ContextSegment& seg : s.context_profile) {
    if (seg.frames.first > seg.frames.last) fail("context segment has first > last");
    try {
      validate(seg.features);
    } catch (const ValidationError& e) {
      fail(std::string("context: ") + e.what());
    }
    for (FrameId f = seg.frames.first; f <= seg.frames.last && f < s.frame_count; ++f) covered[f] = true;
  }
  const auto gap = std::find(covered.begin(), covered.end(), false);
  if (gap != covered.end()) {
    fail("context profile does not cover frame " + std::to_string(gap - covered.begin()));
  }

  std::set<std::string> ids;
  for (const Entity& e : s.entities) {
    const std::string who = "entity '" + e.id + "': ";
    if (e.id.empty()) fail("entity with empty id");
    if (!ids.insert(e.id).second) fail(who + "duplicate id");
    if (!(e.width > 0.0) || !(e.height > 0.0)) fail(who + "size must be positive");
    if (e.waypoints.empty()) fail(who + "needs at least one waypoint");
    for (std::size_t i = 1; i < e.waypoints.size(); ++i) {
      if (e.waypoints[i].frame <= e.waypoints[i - 1].frame) fail(who + "waypoints not strictly sorted by frame");
    }
    for (const FrameRange& r : e.visible) {
      if (r.first > r.last) fail(who + "visible range has first > last");
    }
  }

  for (std::size_t i = 0; i < s.activities.size(); ++i) {
    const Activity& a = s.activities[i];
    const std::string who = "activity " + std::to_string(i) + " (" + std::string(to_string(a.type)) + "): ";
    if (a.trigger_frame >= s.frame_count) fail(who + "trigger_frame outside the scenario");
    if (a.dwell() < 1) fail(who + "dwell_frames must be >= 1");
    std::vector<const Entity*> ps;
    for (const std::string& id : a.participants) {
      const Entity* e = find_entity(s.entities, id);
      if (e == nullptr) {
        fail(who + "unknown participant '" + id + "'");
      } else {
        ps.push_back(e);
      }
    }
    if (ps.size() != a.participants.size()) continue;
    if (is_transition(a.type)) {
      const ClassKind want = container_kind_for(a.type);
      if (ps.size() != 2 || ps[0]->cls.kind() != ClassKind::person || ps[1]->cls.kind() != want) {
        fail(who + "needs exactly one person followed by one " + ObjectClass(want).name());
      }
      if ((a.type == EventType::enter_vehicle || a.type == EventType::board_vessel) && a.trigger_frame == 0) {
        fail(who + "trigger_frame must be >= 1");
      }
    } else {
      if (ps.size() < 2) fail(who + "needs at least two persons");
      for (const Entity* e : ps) {
        if (e->cls.kind() != ClassKind::person) fail(who + "participant '" + e->id + "' is not a person");
      }
    }
  }

  if (!errs.empty()) {
    std::ostringstream os;
    os << "invalid scenario '" << s.name << "':";
    for (const std::string& m : errs) os << "\n  - " << m;
    throw ValidationError(os.str());
  }
}

Point2 entity_position(const Entity& e, FrameId frame) {
  const auto& w = e.waypoints;
  if (frame <= w.front().frame) return {w.front().x, w.front().y};
  if (frame >= w.back().frame) return {w.back().x, w.back().y};
  const auto hi = std::upper_bound(w.begin(), w.end(), frame,
                                   [](FrameId f, const Waypoint& p) { return f < p.frame; });
  const Waypoint& b = *hi;
  const Waypoint& a = *(hi - 1);
  const double t = static_cast<double>(frame - a.frame) / static_cast<double>(b.frame - a.frame);
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

bool entity_visible(const Entity& e, FrameId frame) {
  if (e.visible.empty()) return true;
  return std::any_of(e.visible.begin(), e.visible.end(),
                     [frame](const FrameRange& r) { return frame >= r.first && frame <= r.last; });
}

namespace {

// Replaces keyframes inside [first, last] by the given ones.
void pin_waypoints(Entity& e, FrameId first, FrameId last, std::vector<Waypoint> pins) {
  std::erase_if(e.waypoints, [&](const Waypoint& w) { return w.frame >= first && w.frame <= last; });
  e.waypoints.insert(e.waypoints.end(), pins.begin(), pins.end());
  std::sort(e.waypoints.begin(), e.waypoints.end(),
            [](const Waypoint& a, const Waypoint& b) { return a.frame < b.frame; });
  e.waypoints.erase(std::unique(e.waypoints.begin(), e.waypoints.end(),
                                [](const Waypoint& a, const Waypoint& b) { return a.frame == b.frame; }),
                    e.waypoints.end());
}

// Restricts visibility to frames in [first, last].
void clip_visibility(Entity& e, FrameId first, FrameId last, std::uint64_t frame_count) {
  if (e.visible.empty()) e.visible.push_back({0, frame_count == 0 ? 0 : frame_count - 1});
  std::vector<FrameRange> out;
  for (const FrameRange& r : e.visible) {
    const FrameId a = std::max(r.first, first);
    const FrameId b = std::min(r.last, last);
    if (a <= b) out.push_back({a, b});
  }
  // An empty list would mean "always visible".
  if (out.empty()) out.push_back({frame_count + 1, frame_count + 1});
  e.visible = std::move(out);
}

}  // namespace

std::vector<Entity> realize_activities(const Scenario& s) {
  std::vector<Entity> es = s.entities;
  for (const Activity& a : s.activities) {
    const FrameId t = a.trigger_frame;
    const auto dwell = static_cast<FrameId>(a.dwell());

    if (is_transition(a.type)) {
      Entity& person = *find_entity(es, a.participants[0]);
      const Entity& container = *find_entity(es, a.participants[1]);
      auto at = [&](FrameId f) {
        const Point2 c = entity_position(container, f);
        return Waypoint{f, c.x, c.y};
      };
      if (a.type == EventType::enter_vehicle || a.type == EventType::board_vessel) {
        const FrameId arrive = t > dwell ? t - dwell : 0;
        const FrameId last = t - 1;
        pin_waypoints(person, arrive, UINT64_MAX, {at(arrive), at(last)});
        clip_visibility(person, 0, last, s.frame_count);
      } else {
        const FrameId leave = t + dwell - 1;
        pin_waypoints(person, 0, leave, {at(t), at(leave)});
        clip_visibility(person, t, UINT64_MAX, s.frame_count);
      }
      continue;
    }

    std::vector<Entity*> ps;
    for (const std::string& id : a.participants) ps.push_back(find_entity(es, id));
    const double n = static_cast<double>(ps.size());
    Point2 center{0.0, 0.0};
    if (a.location) {
      center = *a.location;
    } else {
      for (const Entity* p : ps) {
        const Point2 q = entity_position(*p, t);
        center.x += q.x / n;
        center.y += q.y / n;
      }
    }
    const FrameId end = t + dwell - 1;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Point2 slot;
      if (a.type == EventType::meeting) {
        double spacing = 0.0;
        for (const Entity* p : ps) spacing = std::max(spacing, p->width);
        spacing = a.spacing_px.value_or(spacing);
        slot = {center.x + (static_cast<double>(i) - (n - 1.0) / 2.0) * spacing, center.y};
      } else {
        double diag = 0.0;
        for (const Entity* p : ps) diag += std::hypot(p->width, p->height) / n;
        const double r = a.radius_px.value_or(1.7 * diag);
        const double ang = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(i) / n;
        slot = {center.x + r * std::cos(ang), center.y - r * std::sin(ang)};
      }
      pin_waypoints(*ps[i], t, end, {{t, slot.x, slot.y}, {end, slot.x, slot.y}});
    }
  }
  return es;
}

SimulationResult simulate(const Scenario& s) {
  validate(s);
  const std::vector<Entity> es = realize_activities(s);

  SimulationResult out;
  out.stream.reserve(s.frame_count);
  for (FrameId f = 0; f < s.frame_count; ++f) {
    FrameRecord r;
    r.frame_id = f;
    r.timestamp_ms = s.start_timestamp_ms + std::llround(static_cast<double>(f) * 1000.0 / s.fps);
    r.width = s.frame_width;
    r.height = s.frame_height;
    r.geo = s.geo;
    for (const ContextSegment& seg : s.context_profile) {
      if (f >= seg.frames.first && f <= seg.frames.last) {
        r.features = seg.features;
        break;
      }
    }
    for (const Entity& e : es) {
      if (!entity_visible(e, f)) continue;
      const Point2 c = entity_position(e, f);
      const BBox box = bbox_clip({c.x - e.width / 2.0, c.y - e.height / 2.0, e.width, e.height},
                                 s.frame_width, s.frame_height);
      if (bbox_area(box) <= 0.0) continue;
      r.detections.push_back({e.cls, box, 1.0, std::nullopt});
    }
    out.stream.push_back(std::move(r));
  }

  for (std::size_t i = 0; i < s.activities.size(); ++i) {
    const Activity& a = s.activities[i];
    TruthRecord t;
    t.truth_id = i;
    t.type = a.type;
    t.trigger_frame = a.trigger_frame;
    t.end_frame = is_transition(a.type) ? a.trigger_frame
                                        : std::min<FrameId>(a.trigger_frame + a.dwell() - 1, s.frame_count - 1);
    t.participants = a.participants;
    out.truth.push_back(std::move(t));
  }
  return out;
}

void validate(const NoiseParams& n) {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!nonneg(n.jitter_sigma_px)) throw ValidationError("field 'jitter_sigma_px' must be >= 0");
  if (!nonneg(n.drop_prob) || n.drop_prob > 1.0) throw ValidationError("field 'drop_prob' outside [0,1]");
  if (!nonneg(n.false_positive_rate)) throw ValidationError("field 'false_positive_rate' must be >= 0");
  if (!nonneg(n.confidence_sigma)) throw ValidationError("field 'confidence_sigma' must be >= 0");
}

double NoiseRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double NoiseRng::normal(double mean, double sigma) {
  const double u1 = uniform();
  const double u2 = uniform();
  return mean + sigma * std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t NoiseRng::poisson(double lambda) {
  std::uint64_t total = 0;
  while (lambda > 0.0) {
    const double chunk = std::min(lambda, 16.0);
    lambda -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform();
    while (prod > limit) {
      ++total;
      prod *= uniform();
    }
  }
  return total;
}

std::vector<FrameRecord> add_noise(std::span<const FrameRecord> stream, const NoiseParams& n) {
  validate(n);
  static constexpr ClassKind kFalseClasses[] = {ClassKind::person, ClassKind::vehicle, ClassKind::vessel,
                                                ClassKind::building, ClassKind::plane};
  NoiseRng rng(n.seed);
  std::vector<FrameRecord> out;
  out.reserve(stream.size());
  for (const FrameRecord& in : stream) {
    FrameRecord r = in;
    r.detections.clear();
    const double fw = in.width;
    const double fh = in.height;
    auto emit = [&](Detection d) {
      d.bbox = bbox_clip(d.bbox, fw, fh);
      if (bbox_area(d.bbox) > 0.0) r.detections.push_back(std::move(d));
    };

    for (const Detection& src : in.detections) {
      if (n.drop_prob > 0.0 && rng.uniform() < n.drop_prob) continue;
      Detection d = src;
      if (n.jitter_sigma_px > 0.0) {
        d.bbox.x = rng.normal(d.bbox.x, n.jitter_sigma_px);
        d.bbox.y = rng.normal(d.bbox.y, n.jitter_sigma_px);
        d.bbox.w = std::max(1.0, rng.normal(d.bbox.w, n.jitter_sigma_px));
        d.bbox.h = std::max(1.0, rng.normal(d.bbox.h, n.jitter_sigma_px));
      }
      if (n.confidence_sigma > 0.0) {
        d.confidence = std::clamp(rng.normal(d.confidence, n.confidence_sigma), 0.0, 1.0);
      }
      if (n.jitter_sigma_px > 0.0) {
        emit(std::move(d));
      } else {
        r.detections.push_back(std::move(d));
      }
    }

    const std::uint64_t spurious = n.false_positive_rate > 0.0 ? rng.poisson(n.false_positive_rate) : 0;
    for (std::uint64_t k = 0; k < spurious; ++k) {
      Detection d;
      d.cls = kFalseClasses[std::min<std::size_t>(4, static_cast<std::size_t>(rng.uniform() * 5.0))];
      const double w = 10.0 + 70.0 * rng.uniform();
      const double h = 10.0 + 70.0 * rng.uniform();
      const double cx = fw * rng.uniform();
      const double cy = fh * rng.uniform();
      d.bbox = {cx - w / 2.0, cy - h / 2.0, w, h};
      d.confidence = 0.3 + 0.7 * rng.uniform();
      emit(std::move(d));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fmv
