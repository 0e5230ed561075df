#include <gtest/gtest.h>

#include <json.hpp>

#include "fmvsense/evaluate.hpp"
#include "test_support.hpp"

namespace fmv {
namespace {

Event ev(EventType t, FrameId start) {
  Event e;
  e.type = t;
  e.start_frame = e.end_frame = start;
  e.participants = {1, 2};
  return e;
}

TruthRecord truth(EventType t, FrameId trigger) { return {0, t, trigger, trigger, {"a", "b"}}; }

TEST(Evaluate, PerfectMatch) {
  const std::vector<Event> p{ev(EventType::meeting, 40), ev(EventType::crowd, 100)};
  const std::vector<TruthRecord> t{truth(EventType::meeting, 42), truth(EventType::crowd, 100)};
  const EvalReport r = evaluate(p, t, 7);
  EXPECT_DOUBLE_EQ(r.overall.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.overall.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.overall.f1, 1.0);
  EXPECT_DOUBLE_EQ(*r.overall.mean_abs_frame_error, 1.0);
  EXPECT_EQ(r.per_type.size(), 2u);
}

TEST(Evaluate, EmptyPrediction) {
  const EvalReport r = evaluate({}, std::vector{truth(EventType::meeting, 1), truth(EventType::crowd, 2)}, 7);
  EXPECT_DOUBLE_EQ(r.overall.recall, 0.0);
  EXPECT_DOUBLE_EQ(r.overall.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.overall.f1, 0.0);
  EXPECT_FALSE(r.overall.mean_abs_frame_error);
}

TEST(Evaluate, HalfFound) {
  const EvalReport r = evaluate(std::vector{ev(EventType::meeting, 10)},
                                std::vector{truth(EventType::meeting, 10), truth(EventType::meeting, 200)}, 7);
  EXPECT_DOUBLE_EQ(r.overall.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.overall.precision, 1.0);
}

TEST(Evaluate, TypeAndToleranceMatter) {
  EvalReport r = evaluate(std::vector{ev(EventType::exit_vehicle, 10)}, std::vector{truth(EventType::enter_vehicle, 10)}, 7);
  EXPECT_EQ(r.overall.true_positives, 0u);
  EXPECT_EQ(r.overall.false_positives, 1u);
  EXPECT_EQ(r.overall.false_negatives, 1u);

  r = evaluate(std::vector{ev(EventType::meeting, 18)}, std::vector{truth(EventType::meeting, 10)}, 7);
  EXPECT_EQ(r.overall.true_positives, 0u);
  r = evaluate(std::vector{ev(EventType::meeting, 17)}, std::vector{truth(EventType::meeting, 10)}, 7);
  EXPECT_EQ(r.overall.true_positives, 1u);
}

TEST(Evaluate, GreedyTakesClosestPairFirst) {
  const EvalReport r = evaluate(std::vector{ev(EventType::meeting, 10), ev(EventType::meeting, 14)},
                                std::vector{truth(EventType::meeting, 13)}, 7);
  EXPECT_EQ(r.overall.true_positives, 1u);
  EXPECT_DOUBLE_EQ(*r.overall.mean_abs_frame_error, 1.0);
}

TEST(Evaluate, SwappingRolesSwapsPrecisionAndRecall) {
  testing::Gen g(61);
  for (int k = 0; k < 200; ++k) {
    std::vector<Event> p;
    std::vector<TruthRecord> t;
    for (int n = g.integer(0, 8); n > 0; --n) p.push_back(ev(static_cast<EventType>(g.integer(0, 5)), g.integer(0, 100)));
    for (int n = g.integer(0, 8); n > 0; --n) t.push_back(truth(static_cast<EventType>(g.integer(0, 5)), g.integer(0, 100)));
    std::vector<Event> t_as_pred;
    for (const TruthRecord& x : t) t_as_pred.push_back(ev(x.type, x.trigger_frame));
    std::vector<TruthRecord> p_as_truth;
    for (const Event& x : p) p_as_truth.push_back(truth(x.type, x.start_frame));
    // Exact matching is unambiguous, so the roles can be swapped.
    const EvalReport a = evaluate(p, t, 0);
    const EvalReport b = evaluate(t_as_pred, p_as_truth, 0);
    EXPECT_DOUBLE_EQ(a.overall.precision, b.overall.recall);
    EXPECT_DOUBLE_EQ(a.overall.recall, b.overall.precision);

    const EvalReport loose = evaluate(p, t, 5);
    EXPECT_EQ(loose.overall.true_positives + loose.overall.false_positives, p.size());
    EXPECT_EQ(loose.overall.true_positives + loose.overall.false_negatives, t.size());
    EXPECT_GE(loose.overall.true_positives, a.overall.true_positives);
    for (const auto& [type, c] : loose.per_type) {
      EXPECT_GE(c.f1, 0.0);
      EXPECT_LE(c.f1, 1.0);
    }
  }
}

TEST(Evaluate, ReportJson) {
  const auto j = nlohmann::json::parse(
      serialize_report(evaluate(std::vector{ev(EventType::crowd, 3)}, std::vector{truth(EventType::crowd, 4)}, 7)));
  EXPECT_EQ(j["tol_frames"], 7);
  EXPECT_EQ(j["overall"]["matched"], 1);
  EXPECT_EQ(j["per_type"]["crowd"]["recall"], 1.0);
}

}  // namespace
}  // namespace fmv
