#include <gtest/gtest.h>

#include <set>

#include "fmvsense/error.hpp"
#include "fmvsense/evaluate.hpp"
#include "fmvsense/pipeline.hpp"
#include "fmvsense/serialization.hpp"
#include "test_support.hpp"

namespace fmv {
namespace {

using testing::det;

const ContextFeatures kLand{400, 0.1, 0.5};
const ContextFeatures kWater{400, 0.8, 0.5};
const ContextFeatures kHigh{5000, 0.0, 0.5};
const ContextFeatures kMedium{2000, 0.0, 0.5};
const ContextFeatures kDull{400, 0.1, 0.02};

SimulationResult scenario(const std::string& name) {
  return simulate(load_scenario(std::string(FMV_SCENARIO_DIR) + "/" + name + ".json"));
}

// Two persons standing side by side for `n` frames.
std::vector<FrameRecord> meeting_stream(std::size_t n, ContextFeatures f) {
  std::vector<FrameRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(testing::frame(
        i, {det(ClassKind::person, {500, 500, 24, 48}, 1.0), det(ClassKind::person, {524, 500, 24, 48}, 1.0)}, f));
  }
  return out;
}

TEST(Pipeline, CanonicalScenariosMatchTruth) {
  for (const char* name : {"enter_vehicle_basic", "exit_vehicle_basic", "meeting_basic", "crowd_basic",
                           "board_vessel_basic", "disembark_vessel_basic"}) {
    const SimulationResult sim = scenario(name);
    const RunResult run = run_pipeline(sim.stream, EngineConfig{});
    const EvalReport rep = evaluate(run.events, sim.truth, 7);
    EXPECT_EQ(rep.overall.true_positives, sim.truth.size()) << name;
    EXPECT_EQ(rep.overall.false_positives, 0u) << name;
    for (const Event& e : run.events) {
      EXPECT_TRUE(e.geo.has_value()) << name;
      EXPECT_LE(e.start_frame, e.end_frame);
      EXPECT_LT(e.end_frame, sim.stream.size());
    }
  }
}

TEST(Pipeline, UneventfulStreamIsSkipped) {
  const auto stream = meeting_stream(50, kDull);
  const RunResult r = run_pipeline(stream, EngineConfig{});
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.stats.frames_skipped, 50u);
  EXPECT_EQ(r.stats.frames_processed, 0u);
  EXPECT_EQ(r.stats.cataloging_invocations, 0u);
  EXPECT_EQ(r.stats.detections_after_gates, 0u);
  EXPECT_EQ(r.stats.tracks_born, 0u);
}

TEST(Pipeline, UneventfulFramesNeverCarryEvents) {
  // The meeting only happens while the scene is uneventful.
  std::vector<FrameRecord> stream;
  for (std::size_t i = 0; i < 60; ++i) {
    std::vector<Detection> dets{det(ClassKind::person, {100, 100, 24, 48}, 1.0)};
    if (i >= 20 && i < 40) dets.push_back(det(ClassKind::person, {124, 100, 24, 48}, 1.0));
    stream.push_back(testing::frame(i, dets, i >= 15 && i < 45 ? kDull : kLand));
  }
  const RunResult r = run_pipeline(stream, EngineConfig{});
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.stats.frames_skipped, 30u);
}

TEST(Pipeline, MeetingEmittedWithMetadata) {
  auto stream = meeting_stream(20, kLand);
  for (FrameRecord& f : stream) f.geo = GeoMeta{10.0, 20.0, 0.5, 0.0};
  const RunResult r = run_pipeline(stream, EngineConfig{});
  ASSERT_EQ(r.events.size(), 1u);
  const Event& e = r.events[0];
  EXPECT_EQ(e.type, EventType::meeting);
  EXPECT_EQ(e.start_frame, 0u);
  EXPECT_EQ(e.end_frame, 19u);
  EXPECT_EQ(e.start_timestamp_ms, 0);
  EXPECT_EQ(e.end_timestamp_ms, 19 * 33);
  EXPECT_EQ(e.context_label, ContextLabel::low_altitude);
  EXPECT_EQ(e.anchor_bbox, (BBox{500, 500, 48, 48}));
  ASSERT_TRUE(e.geo);
  EXPECT_EQ(r.stats.events_emitted, 1u);
  EXPECT_EQ(r.stats.events_ungeolocated, 0u);
}

TEST(Pipeline, MissingGeoDegrades) {
  const RunResult r = run_pipeline(meeting_stream(20, kLand), EngineConfig{});
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_FALSE(r.events[0].geo);
  EXPECT_EQ(r.stats.events_ungeolocated, 1u);

  auto stream = meeting_stream(20, kLand);
  for (FrameRecord& f : stream) f.geo = GeoMeta{10.0, 20.0, 0.5, 0.0};
  EngineConfig cfg;
  cfg.output.geolocate = false;
  EXPECT_FALSE(run_pipeline(stream, cfg).events.at(0).geo);
}

TEST(Pipeline, UnknownClassNeverTriggersEvents) {
  std::vector<FrameRecord> stream;
  for (std::size_t i = 0; i < 20; ++i) {
    stream.push_back(testing::frame(i, {{ObjectClass::other("camel"), {500, 500, 24, 48}, 1.0, std::nullopt},
                                        {ObjectClass::other("camel"), {524, 500, 24, 48}, 1.0, std::nullopt}}));
  }
  const RunResult r = run_pipeline(stream, EngineConfig{});
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.stats.detections_in, 40u);
}

std::vector<FrameRecord> vessel_stream(ContextFeatures f) {
  std::vector<FrameRecord> out;
  for (std::size_t i = 0; i < 20; ++i) {
    out.push_back(testing::frame(i, {det(ClassKind::vessel, {800.0 + i, 400, 120, 50}, 0.85)}, f));
  }
  return out;
}

TEST(Pipeline, VesselGateDependsOnWaterContext) {
  const RunResult water = run_pipeline(vessel_stream(kWater), EngineConfig{});
  EXPECT_EQ(water.stats.tracks_born, 1u);
  for (const ContextFeatures& f : {kLand, kHigh, kMedium}) {
    const RunResult r = run_pipeline(vessel_stream(f), EngineConfig{});
    EXPECT_EQ(r.stats.tracks_born, 0u);
    EXPECT_EQ(r.stats.detections_after_gates, 0u);
    EXPECT_TRUE(r.events.empty());
  }
}

TEST(Pipeline, TileLocalDetectionsAreMapped) {
  const EngineConfig cfg;
  const TilePlan plan = plan_pyramid(1920, 1080, select_config(ContextLabel::low_altitude, cfg.table));
  ASSERT_FALSE(plan.tiles.empty());
  const Tile& tile = plan.tiles.back();
  std::vector<FrameRecord> stream;
  for (std::size_t i = 0; i < 10; ++i) {
    const Detection global = det(ClassKind::person, {tile.origin_x + 100.0, tile.origin_y + 100.0, 24, 48}, 1.0);
    Detection local = map_frame_to_tile(global, tile);
    local.tile = tile.index;
    const Detection partner = det(ClassKind::person, {tile.origin_x + 124.0, tile.origin_y + 100.0, 24, 48}, 1.0);
    stream.push_back(testing::frame(i, {local, partner}));
  }
  Engine engine{cfg};
  for (const FrameRecord& f : stream) engine.push(f);
  const auto& events = engine.finish();
  ASSERT_EQ(events.size(), 1u);
  const BBox& a = events[0].anchor_bbox;
  EXPECT_NEAR(a.x, tile.origin_x + 100.0, 1e-9);
  EXPECT_NEAR(a.y, tile.origin_y + 100.0, 1e-9);
  EXPECT_NEAR(a.w, 48.0, 1e-9);
  EXPECT_NEAR(a.h, 48.0, 1e-9);

  Engine bad{cfg};
  FrameRecord f = stream[0];
  f.detections[0].tile = static_cast<int>(plan.tiles.size());
  EXPECT_THROW(bad.push(f), ValidationError);
}

TEST(Pipeline, CrossTileDuplicatesMerge) {
  Engine engine{EngineConfig{}};
  FrameRecord f = testing::frame(0, {det(ClassKind::vehicle, {300, 300, 80, 40}, 0.99),
                                     det(ClassKind::vehicle, {301, 300, 80, 40}, 0.98)});
  engine.push(f);
  EXPECT_EQ(engine.stats().detections_after_gates, 2u);
  EXPECT_EQ(engine.stats().detections_after_nms, 1u);
}

TEST(Pipeline, EngineStateErrors) {
  Engine engine{EngineConfig{}};
  EXPECT_THROW(engine.events(), ValidationError);
  engine.push(testing::frame(5, {}));
  EXPECT_THROW(engine.push(testing::frame(5, {})), ValidationError);
  FrameRecord no_context = testing::frame(6, {});
  no_context.features.reset();
  EXPECT_THROW(engine.push(no_context), ValidationError);
  engine.finish();
  EXPECT_EQ(&engine.finish(), &engine.events());
  EXPECT_THROW(engine.push(testing::frame(9, {})), ValidationError);

  EngineConfig bad;
  bad.nms_iou_threshold = 2.0;
  EXPECT_THROW(Engine{bad}, ValidationError);
}

TEST(Pipeline, ParticipantsExistAndRunsAreDeterministic) {
  NoiseParams n{2.0, 0.05, 0.5, 0.05, 99};
  for (const char* name : {"crowd_basic", "enter_vehicle_basic"}) {
    const auto stream = add_noise(scenario(name).stream, n);
    Engine engine{EngineConfig{}};
    for (const FrameRecord& f : stream) engine.push(f);
    const auto& events = engine.finish();
    for (const Event& e : events) {
      EXPECT_FALSE(e.participants.empty());
      for (TrackId id : e.participants) EXPECT_NE(engine.tracker().find(id), nullptr);
      if (is_transition(e.type)) EXPECT_EQ(e.participants.size(), 2u);
      if (e.type == EventType::crowd) EXPECT_GE(e.participants.size(), 5u);
    }
    const RunResult again = run_pipeline(stream, EngineConfig{});
    EXPECT_EQ(again.events, events);
    EXPECT_EQ(again.stats, engine.stats());
    EXPECT_EQ(export_events(again.events), export_events(events));
  }
}

}  // namespace
}  // namespace fmv
