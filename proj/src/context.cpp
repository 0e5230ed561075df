#include "fmvsense/context.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fmvsense/error.hpp"

namespace fmv {

namespace {

constexpr std::string_view kLabelNames[] = {"high_altitude", "medium_altitude", "low_altitude", "water",
                                            "uneventful"};

}  // namespace

std::string_view to_string(ContextLabel label) { return kLabelNames[static_cast<std::size_t>(label)]; }

ContextLabel context_label_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kLabelNames); ++i) {
    if (name == kLabelNames[i]) return static_cast<ContextLabel>(i);
  }
  throw ValidationError("unknown context label '" + std::string(name) + "'");
}

void validate(const ReferenceThresholds& t) {
  auto in01 = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in01(t.uneventful_clutter_below)) throw ValidationError("field 'uneventful_clutter_below' outside [0,1]");
  if (!in01(t.water_fraction_min)) throw ValidationError("field 'water_fraction_min' outside [0,1]");
  if (!std::isfinite(t.medium_altitude_min_m) || t.medium_altitude_min_m < 0.0)
    throw ValidationError("field 'medium_altitude_min_m' must be >= 0");
  if (!std::isfinite(t.high_altitude_min_m) || t.high_altitude_min_m < t.medium_altitude_min_m)
    throw ValidationError("field 'high_altitude_min_m' must be >= medium_altitude_min_m");
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw ValidationError("softmax of an empty vector");
  for (double z : logits) {
    if (!std::isfinite(z)) throw ValidationError("softmax input is not finite");
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - zmax);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

SceneContext classify_from_logits(std::span<const double> logits) {
  if (logits.size() != kContextLabelCount) {
    throw ValidationError("context logits must have length 5, got " + std::to_string(logits.size()));
  }
  const std::vector<double> p = softmax(logits);
  SceneContext ctx;
  std::copy(p.begin(), p.end(), ctx.probs.begin());
  // First index wins ties: max_element returns the first maximum. Ties are
  // decided on the logits so that rounding in exp() cannot break them.
  const auto best = std::max_element(logits.begin(), logits.end());
  ctx.label = static_cast<ContextLabel>(std::distance(logits.begin(), best));
  return ctx;
}

SceneContext classify_reference(const ContextFeatures& f, const ReferenceThresholds& t) {
  ContextLabel label;
  if (f.clutter_score < t.uneventful_clutter_below) {
    label = ContextLabel::uneventful;
  } else if (f.water_fraction >= t.water_fraction_min) {
    label = ContextLabel::water;
  } else if (f.altitude_m >= t.high_altitude_min_m) {
    label = ContextLabel::high_altitude;
  } else if (f.altitude_m >= t.medium_altitude_min_m) {
    label = ContextLabel::medium_altitude;
  } else {
    label = ContextLabel::low_altitude;
  }
  SceneContext ctx;
  ctx.label = label;
  ctx.probs[static_cast<std::size_t>(label)] = 1.0;
  return ctx;
}

SceneContext classify_frame(const FrameRecord& frame, const ReferenceThresholds& t) {
  if (frame.context_logits) return classify_from_logits(*frame.context_logits);
  if (frame.features) return classify_reference(*frame.features, t);
  throw ValidationError("frame " + std::to_string(frame.frame_id) +
                        " carries neither context_logits nor features");
}

const DetectorConfig& select_config(ContextLabel label, const ContextConfigTable& table) {
  if (label == ContextLabel::uneventful) {
    throw ValidationError("no detector configuration for the uneventful context");
  }
  const auto it = table.find(label);
  if (it == table.end()) {
    throw ValidationError("context table has no entry for '" + std::string(to_string(label)) + "'");
  }
  return it->second;
}

void validate(const ContextConfigTable& table) {
  for (ContextLabel label : kAllContextLabels) {
    if (label == ContextLabel::uneventful) continue;
    const auto it = table.find(label);
    if (it == table.end()) {
      throw ValidationError("context table has no entry for '" + std::string(to_string(label)) + "'");
    }
    try {
      validate(it->second);
    } catch (const ValidationError& e) {
      throw ValidationError("detector config '" + std::string(to_string(label)) + "': " + e.what());
    }
  }
}

ContextConfigTable default_context_table() {
  auto base_gates = [](double vehicle_max_frac, double vessel_min_conf) {
    std::map<ObjectClass, ClassGate> g;
    g[ClassKind::person] = {0.5, 0.0, std::nullopt, std::nullopt};
    g[ClassKind::vehicle] = {0.5, 0.0, std::nullopt, vehicle_max_frac};
    g[ClassKind::vessel] = {vessel_min_conf, 0.0, std::nullopt, std::nullopt};
    g[ClassKind::building] = {0.5, 0.0, std::nullopt, std::nullopt};
    g[ClassKind::plane] = {0.5, 0.0, std::nullopt, std::nullopt};
    return g;
  };

  ContextConfigTable table;
  table[ContextLabel::high_altitude] = {{2.0, 1.0}, 1024, 0.2, base_gates(0.002, 0.9)};
  table[ContextLabel::medium_altitude] = {{1.0, 0.5}, 1024, 0.2, base_gates(0.02, 0.9)};
  table[ContextLabel::low_altitude] = {{0.5}, 1024, 0.2, base_gates(0.02, 0.9)};
  table[ContextLabel::water] = {{1.0, 0.5}, 1024, 0.2, base_gates(0.02, 0.5)};
  return table;
}

}  // namespace fmv
