#pragma once

// Scene-context classification. A frame is assigned one of five labels; the
// label gates the rest of the pipeline (uneventful frames are skipped) and
// selects the detector configuration used for cataloging.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fmvsense/cataloging.hpp"
#include "fmvsense/model.hpp"

namespace fmv {

/// Declaration order is the tie-break precedence and the probability index.
enum class ContextLabel : std::uint8_t { high_altitude, medium_altitude, low_altitude, water, uneventful };

inline constexpr std::array<ContextLabel, kContextLabelCount> kAllContextLabels = {
    ContextLabel::high_altitude, ContextLabel::medium_altitude, ContextLabel::low_altitude,
    ContextLabel::water, ContextLabel::uneventful};

std::string_view to_string(ContextLabel label);
/// Throws ValidationError for an unknown name.
ContextLabel context_label_from_string(std::string_view name);

struct SceneContext {
  ContextLabel label = ContextLabel::uneventful;
  std::array<double, kContextLabelCount> probs{};
};

/// Rule thresholds for the feature-based reference classifier.
struct ReferenceThresholds {
  double uneventful_clutter_below = 0.1;
  double water_fraction_min = 0.5;
  double high_altitude_min_m = 3000.0;
  double medium_altitude_min_m = 1000.0;
};

void validate(const ReferenceThresholds& t);

using ContextConfigTable = std::map<ContextLabel, DetectorConfig>;

/// Max-subtracted softmax. Throws ValidationError on empty or non-finite input.
std::vector<double> softmax(std::span<const double> logits);

/// Softmax head over five external logits; label is the first arg-max.
SceneContext classify_from_logits(std::span<const double> logits);

/// Deterministic rules with precedence uneventful > water > altitude bins.
/// The returned probabilities are one-hot.
SceneContext classify_reference(const ContextFeatures& f, const ReferenceThresholds& t = {});

/// Logits take precedence over features when a frame carries both.
/// Throws ValidationError when the frame carries neither.
SceneContext classify_frame(const FrameRecord& frame, const ReferenceThresholds& t);

inline bool is_actionable(const SceneContext& ctx) { return ctx.label != ContextLabel::uneventful; }

/// Returns the table entry for the label. Throws ValidationError for the
/// uneventful label (callers gate first) or a missing entry.
const DetectorConfig& select_config(ContextLabel label, const ContextConfigTable& table);

/// Checks that every non-uneventful label has a valid entry.
void validate(const ContextConfigTable& table);

/// Shipped table: vessels need 0.9 confidence outside water scenes and
/// high-altitude vehicles are capped at a much smaller size.
ContextConfigTable default_context_table();

}  // namespace fmv
