#include <gtest/gtest.h>

#include <cmath>

#include "fmvsense/error.hpp"
#include "fmvsense/events.hpp"
#include "test_support.hpp"

namespace fmv {
namespace {

using testing::det;

const EventParams kDefaults{};

std::vector<PersonBox> people(std::initializer_list<BBox> boxes) {
  std::vector<PersonBox> out;
  TrackId id = 0;
  for (const BBox& b : boxes) out.push_back({id++, b});
  return out;
}

TEST(Meetings, Examples) {
  EXPECT_EQ(detect_meetings(people({{0, 0, 10, 10}, {4, 0, 10, 10}}), kDefaults), (std::vector<Group>{{0, 1}}));
  EXPECT_TRUE(detect_meetings(people({{0, 0, 10, 10}, {500, 0, 10, 10}}), kDefaults).empty());
  // A-B and B-C within reach (14.1 px), A-C 24 px apart.
  EXPECT_EQ(detect_meetings(people({{0, 0, 10, 10}, {12, 0, 10, 10}, {24, 0, 10, 10}}), kDefaults),
            (std::vector<Group>{{0, 1, 2}}));
}

// Connected components by flood fill over the same edge rule.
std::vector<Group> components_oracle(const std::vector<PersonBox>& ps, double k) {
  const std::size_t n = ps.size();
  auto edge = [&](std::size_t i, std::size_t j) {
    const Point2 a = bbox_center(ps[i].bbox), b = bbox_center(ps[j].bbox);
    const double reach = k * (bbox_diagonal(ps[i].bbox) + bbox_diagonal(ps[j].bbox)) / 2.0;
    return bbox_intersection_area(ps[i].bbox, ps[j].bbox) > 0.0 || std::hypot(a.x - b.x, a.y - b.y) <= reach;
  };
  std::vector<int> comp(n, -1);
  std::vector<Group> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    Group g;
    std::vector<std::size_t> stack{s};
    comp[s] = static_cast<int>(s);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      g.push_back(ps[i].id);
      for (std::size_t j = 0; j < n; ++j) {
        if (comp[j] < 0 && edge(i, j)) {
          comp[j] = static_cast<int>(s);
          stack.push_back(j);
        }
      }
    }
    std::sort(g.begin(), g.end());
    if (g.size() >= 2) out.push_back(g);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Meetings, MatchComponentOracle) {
  testing::Gen g(41);
  for (int k = 0; k < 300; ++k) {
    std::vector<PersonBox> ps;
    for (int i = g.integer(0, 12); i > 0; --i) {
      ps.push_back({static_cast<TrackId>(ps.size()), {g.real(0, 300), g.real(0, 300), g.real(5, 30), g.real(5, 50)}});
    }
    EXPECT_EQ(detect_meetings(ps, kDefaults), components_oracle(ps, kDefaults.meeting_k));
  }
}

TEST(Crowds, Examples) {
  std::vector<PersonBox> five;
  for (int i = 0; i < 5; ++i) five.push_back({TrackId(i), {100.0 + 12 * i, 100, 10, 20}});
  EXPECT_EQ(detect_crowds(five, kDefaults), (std::vector<Group>{{0, 1, 2, 3, 4}}));

  std::vector<PersonBox> four(five.begin(), five.begin() + 4);
  EXPECT_TRUE(detect_crowds(four, kDefaults).empty());

  std::vector<PersonBox> spread;
  for (int i = 0; i < 5; ++i) spread.push_back({TrackId(i), {400.0 * i, 300.0 * (i % 2), 10, 20}});
  EXPECT_TRUE(detect_crowds(spread, kDefaults).empty());
}

TEST(Crowds, SecondClusterFoundAmongExcluded) {
  std::vector<PersonBox> ps;
  for (int i = 0; i < 6; ++i) ps.push_back({TrackId(i), {100.0 + 5 * i, 100, 10, 20}});
  for (int i = 0; i < 5; ++i) ps.push_back({TrackId(10 + i), {1500.0 + 5 * i, 900, 10, 20}});
  // Far apart: the joint centroid lies between them, so nobody is a member
  // of the first pass and the excluded set is everyone; no second pass.
  EXPECT_TRUE(detect_crowds(ps, kDefaults).empty());

  // Make the first cluster dominate the centroid.
  std::vector<PersonBox> skewed;
  for (int i = 0; i < 60; ++i) skewed.push_back({TrackId(i), {100.0 + (i % 6) * 3, 100.0 + (i / 6) * 3, 10, 20}});
  for (int i = 0; i < 5; ++i) skewed.push_back({TrackId(100 + i), {400.0 + 5 * i, 100, 10, 20}});
  const auto groups = detect_crowds(skewed, kDefaults);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].size(), 60u);
  EXPECT_EQ(groups[1], (Group{100, 101, 102, 103, 104}));
}

TEST(Crowds, MembersWithinRadiusOfCentroid) {
  testing::Gen g(42);
  for (int k = 0; k < 300; ++k) {
    std::vector<PersonBox> ps;
    for (int i = g.integer(0, 15); i > 0; --i) {
      ps.push_back({static_cast<TrackId>(ps.size()), {g.real(0, 200), g.real(0, 200), 10, 20}});
    }
    const auto groups = detect_crowds(ps, kDefaults);
    if (groups.empty()) continue;
    double cx = 0, cy = 0;
    for (const PersonBox& p : ps) {
      cx += bbox_center(p.bbox).x / ps.size();
      cy += bbox_center(p.bbox).y / ps.size();
    }
    const double r = kDefaults.crowd_radius_k * std::hypot(10.0, 20.0);
    EXPECT_GE(static_cast<int>(groups[0].size()), kDefaults.crowd_min_count);
    for (const PersonBox& p : ps) {
      const bool member = std::binary_search(groups[0].begin(), groups[0].end(), p.id);
      const Point2 c = bbox_center(p.bbox);
      EXPECT_EQ(member, std::hypot(c.x - cx, c.y - cy) <= r + 1e-9);
    }
  }
}

TEST(Interaction, IouOrContainment) {
  const BBox car{100, 100, 80, 40};
  EXPECT_TRUE(interacts({130, 100, 10, 20}, car, 0.1));   // center inside
  EXPECT_TRUE(interacts({90, 90, 80, 40}, car, 0.1));     // large overlap
  EXPECT_FALSE(interacts({175, 100, 20, 40}, car, 0.1));  // grazing edge
  EXPECT_FALSE(interacts({300, 300, 10, 20}, car, 0.1));
}

TEST(Jaccard, Values) {
  EXPECT_DOUBLE_EQ(jaccard({1, 2}, {2, 3}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(jaccard({1, 2}, {1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(jaccard({}, {}), 0.0);
}

// Feeds a meeting group present on the given frames and returns the events.
std::vector<Event> debounce_meeting(const std::vector<FrameId>& fire, FrameId last_frame) {
  Debouncer d(kDefaults);
  std::size_t k = 0;
  for (FrameId f = 0; f <= last_frame; ++f) {
    std::vector<RawGroup> groups;
    if (k < fire.size() && fire[k] == f) {
      groups.push_back({EventType::meeting, {1, 2}, {0, 0, 10, 10}});
      ++k;
    }
    d.observe_frame(f, groups);
  }
  return d.finish();
}

std::vector<FrameId> frames(FrameId a, FrameId b) {
  std::vector<FrameId> v;
  for (FrameId f = a; f <= b; ++f) v.push_back(f);
  return v;
}

TEST(Debounce, PersistentGroupIsOneEvent) {
  const auto ev = debounce_meeting(frames(10, 39), 80);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].start_frame, 10u);
  EXPECT_EQ(ev[0].end_frame, 39u);
  EXPECT_EQ(ev[0].participants, (std::vector<TrackId>{1, 2}));
}

TEST(Debounce, ShortGroupIsIgnored) { EXPECT_TRUE(debounce_meeting(frames(10, 11), 80).empty()); }

TEST(Debounce, OneFrameBreakStaysOneEvent) {
  auto fire = frames(10, 20);
  for (FrameId f : frames(22, 40)) fire.push_back(f);
  const auto ev = debounce_meeting(fire, 100);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].start_frame, 10u);
  EXPECT_EQ(ev[0].end_frame, 40u);
}

TEST(Debounce, RefireAfterCooldownIsNewEvent) {
  auto fire = frames(10, 20);
  for (FrameId f : frames(60, 70)) fire.push_back(f);
  const auto ev = debounce_meeting(fire, 100);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[1].start_frame, 60u);
}

TEST(Debounce, TransitionCooldownPerPerson) {
  Debouncer d(kDefaults);
  d.observe_transition({EventType::enter_vehicle, 5, 1, 100, 104, {}});
  d.observe_transition({EventType::enter_vehicle, 5, 2, 110, 114, {}});  // within cooldown
  d.observe_transition({EventType::enter_vehicle, 6, 1, 110, 114, {}});  // other person
  d.observe_transition({EventType::enter_vehicle, 5, 1, 200, 204, {}});
  const auto ev = d.finish();
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_EQ(ev[0].participants, (std::vector<TrackId>{1, 5}));
  EXPECT_EQ(ev[2].start_frame, 200u);
}

// Runs scripted per-frame detections through a tracker and the transition
// rules, returning every raw transition.
std::vector<RawTransition> run_transitions(const std::vector<std::vector<Detection>>& script) {
  Tracker tracker;
  TransitionDetector td(kDefaults);
  std::vector<RawTransition> out;
  for (FrameId f = 0; f < script.size(); ++f) {
    const StepResult r = tracker.step(f, script[f]);
    for (const RawTransition& t : td.update(f, tracker, r)) out.push_back(t);
  }
  return out;
}

const BBox kCar{500, 300, 80, 40};

TEST(Transitions, PersonWalksIntoCarAndVanishes) {
  std::vector<std::vector<Detection>> script;
  for (int f = 0; f < 40; ++f) {
    std::vector<Detection> dets{det(ClassKind::vehicle, kCar, 1.0)};
    if (f < 30) dets.push_back(det(ClassKind::person, {400.0 + 4 * f, 296, 24, 48}, 1.0));
    script.push_back(dets);
  }
  const auto t = run_transitions(script);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].type, EventType::enter_vehicle);
  EXPECT_EQ(t[0].start_frame, 29u);
  EXPECT_EQ(t[0].end_frame, 33u);
}

TEST(Transitions, PersonWalkingPastCarIsNoEvent) {
  std::vector<std::vector<Detection>> script;
  for (int f = 0; f < 80; ++f) {
    script.push_back({det(ClassKind::vehicle, kCar, 1.0), det(ClassKind::person, {400.0 + 4 * f, 296, 24, 48}, 1.0)});
  }
  EXPECT_TRUE(run_transitions(script).empty());
}

TEST(Transitions, PersonAppearsFromCar) {
  std::vector<std::vector<Detection>> script;
  for (int f = 0; f < 40; ++f) {
    std::vector<Detection> dets{det(ClassKind::vehicle, kCar, 1.0)};
    if (f >= 10) dets.push_back(det(ClassKind::person, {528.0 + 4 * (f - 10), 296, 24, 48}, 1.0));
    script.push_back(dets);
  }
  const auto t = run_transitions(script);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].type, EventType::exit_vehicle);
  EXPECT_EQ(t[0].start_frame, 10u);
}

TEST(Transitions, SingleFrameBlipInsideCarIsNoExit) {
  std::vector<std::vector<Detection>> script;
  for (int f = 0; f < 20; ++f) {
    std::vector<Detection> dets{det(ClassKind::vehicle, kCar, 1.0)};
    if (f == 5) dets.push_back(det(ClassKind::person, {528, 296, 24, 48}, 1.0));
    script.push_back(dets);
  }
  EXPECT_TRUE(run_transitions(script).empty());
}

TEST(Transitions, AlreadyOverlappingVesselDoesNotBoard) {
  const BBox boat{500, 300, 120, 50};
  std::vector<std::vector<Detection>> script;
  for (int f = 0; f < 20; ++f) {
    std::vector<Detection> dets{det(ClassKind::vessel, boat, 1.0)};
    // Present on the boat from its first frame, then gone.
    if (f < 8) dets.push_back(det(ClassKind::person, {540, 300, 24, 48}, 1.0));
    script.push_back(dets);
  }
  const auto t = run_transitions(script);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].type, EventType::disembark_vessel);  // born on the boat
}

TEST(Transitions, BoardVessel) {
  const BBox boat{500, 300, 120, 50};
  std::vector<std::vector<Detection>> script;
  for (int f = 0; f < 40; ++f) {
    std::vector<Detection> dets{det(ClassKind::vessel, boat, 1.0)};
    if (f < 30) dets.push_back(det(ClassKind::person, {400.0 + 4 * f, 300, 24, 48}, 1.0));
    script.push_back(dets);
  }
  const auto t = run_transitions(script);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].type, EventType::board_vessel);
}

TEST(EventParams, Validation) {
  EventParams p;
  EXPECT_NO_THROW(validate(p));
  p.crowd_min_count = 1;
  EXPECT_THROW(validate(p), ValidationError);
  p = {};
  p.debounce_frames = 0;
  EXPECT_THROW(validate(p), ValidationError);
  p = {};
  p.interaction_iou = 1.5;
  EXPECT_THROW(validate(p), ValidationError);
}

TEST(EventType, NamesRoundTrip) {
  for (EventType t : kAllEventTypes) EXPECT_EQ(event_type_from_string(to_string(t)), t);
  EXPECT_THROW(event_type_from_string("parade"), ValidationError);
}

}  // namespace
}  // namespace fmv
