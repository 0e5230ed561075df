#pragma once

// Scores predicted events against simulator ground truth with a frame
// tolerance on the trigger time.

#include <map>
#include <optional>
#include <span>
#include <string>

#include "fmvsense/events.hpp"
#include "fmvsense/simulator.hpp"

namespace fmv {

struct EvalCounts {
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  /// 1 when nothing was predicted.
  double precision = 1.0;
  /// 1 when there was nothing to find.
  double recall = 1.0;
  double f1 = 1.0;
  /// Mean |predicted start - truth trigger| over matched pairs; empty when
  /// nothing matched.
  std::optional<double> mean_abs_frame_error;
};

struct EvalReport {
  std::uint64_t tol_frames = 0;
  EvalCounts overall;
  std::map<EventType, EvalCounts> per_type;
};

/// Greedy per-type matching: same-type pairs within tolerance are accepted
/// in ascending |start - trigger| order (ties: prediction index, then truth
/// index), each event used at most once.
EvalReport evaluate(std::span<const Event> predicted, std::span<const TruthRecord> truth, std::uint64_t tol_frames);

std::string serialize_report(const EvalReport& r);

}  // namespace fmv
