#include "fmvsense/evaluate.hpp"

#include <algorithm>
#include <tuple>

#include "json_util.hpp"

namespace fmv {

namespace {

struct Tally {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  double abs_error_sum = 0.0;
};

EvalCounts finish(const Tally& t) {
  EvalCounts c;
  c.true_positives = t.tp;
  c.false_positives = t.fp;
  c.false_negatives = t.fn;
  const double tp = static_cast<double>(t.tp);
  c.precision = t.tp + t.fp == 0 ? 1.0 : tp / static_cast<double>(t.tp + t.fp);
  c.recall = t.tp + t.fn == 0 ? 1.0 : tp / static_cast<double>(t.tp + t.fn);
  c.f1 = c.precision + c.recall > 0.0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
  if (t.tp > 0) c.mean_abs_frame_error = t.abs_error_sum / tp;
  return c;
}

std::uint64_t frame_gap(FrameId a, FrameId b) { return a > b ? a - b : b - a; }

}  // namespace

EvalReport evaluate(std::span<const Event> predicted, std::span<const TruthRecord> truth, std::uint64_t tol_frames) {
  EvalReport report;
  report.tol_frames = tol_frames;
  Tally overall;

  for (EventType type : kAllEventTypes) {
    std::vector<std::size_t> preds, truths;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (predicted[i].type == type) preds.push_back(i);
    }
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i].type == type) truths.push_back(i);
    }
    if (preds.empty() && truths.empty()) continue;

    std::vector<std::tuple<std::uint64_t, std::size_t, std::size_t>> pairs;
    for (std::size_t p : preds) {
      for (std::size_t t : truths) {
        const std::uint64_t gap = frame_gap(predicted[p].start_frame, truth[t].trigger_frame);
        if (gap <= tol_frames) pairs.emplace_back(gap, p, t);
      }
    }
    std::sort(pairs.begin(), pairs.end());

    std::vector<std::size_t> used_p, used_t;
    Tally tally;
    for (const auto& [gap, p, t] : pairs) {
      if (std::find(used_p.begin(), used_p.end(), p) != used_p.end()) continue;
      if (std::find(used_t.begin(), used_t.end(), t) != used_t.end()) continue;
      used_p.push_back(p);
      used_t.push_back(t);
      ++tally.tp;
      tally.abs_error_sum += static_cast<double>(gap);
    }
    tally.fp = preds.size() - tally.tp;
    tally.fn = truths.size() - tally.tp;
    report.per_type[type] = finish(tally);
    overall.tp += tally.tp;
    overall.fp += tally.fp;
    overall.fn += tally.fn;
    overall.abs_error_sum += tally.abs_error_sum;
  }
  report.overall = finish(overall);
  return report;
}

namespace {

detail::ojson counts_to_json(const EvalCounts& c) {
  return {{"true_positives", c.true_positives},
          {"false_positives", c.false_positives},
          {"false_negatives", c.false_negatives},
          {"matched", c.true_positives},
          {"precision", c.precision},
          {"recall", c.recall},
          {"f1", c.f1},
          {"mean_abs_frame_error",
           c.mean_abs_frame_error ? detail::ojson(*c.mean_abs_frame_error) : detail::ojson(nullptr)}};
}

}  // namespace

std::string serialize_report(const EvalReport& r) {
  detail::ojson per = detail::ojson::object();
  for (const auto& [type, c] : r.per_type) per[std::string(to_string(type))] = counts_to_json(c);
  const detail::ojson j = {{"tol_frames", r.tol_frames}, {"overall", counts_to_json(r.overall)}, {"per_type", per}};
  return j.dump(2) + "\n";
}

}  // namespace fmv
