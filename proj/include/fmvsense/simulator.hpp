#pragma once

// Scenario simulator: scripted entities with keyframed trajectories emit
// perfect detections every frame they are visible, and scripted activities
// edit trajectories/visibility so that each one realizes its event type. The
// ground truth is the activity list itself.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fmvsense/events.hpp"
#include "fmvsense/model.hpp"

namespace fmv {

/// Keyframe position of the box center.
struct Waypoint {
  FrameId frame = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Inclusive frame interval.
struct FrameRange {
  FrameId first = 0;
  FrameId last = 0;
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

struct Entity {
  std::string id;
  ObjectClass cls;
  double width = 0.0;
  double height = 0.0;
  std::vector<Waypoint> waypoints;
  /// Empty means visible for the whole scenario.
  std::vector<FrameRange> visible;
};

struct Activity {
  EventType type = EventType::meeting;
  /// Transitions: person first, then the vehicle or vessel.
  std::vector<std::string> participants;
  FrameId trigger_frame = 0;
  /// Defaults: 5 for transitions, 30 for meetings and crowds.
  std::optional<int> dwell_frames;
  /// Gathering point for meetings and crowds; defaults to the mean position
  /// of the participants at the trigger frame.
  std::optional<Point2> location;
  /// Side-by-side spacing of meeting participants; defaults to the widest box.
  std::optional<double> spacing_px;
  /// Ring radius of a crowd; defaults to 1.7 mean participant diagonals.
  std::optional<double> radius_px;

  int dwell() const;
};

struct ContextSegment {
  FrameRange frames;
  ContextFeatures features;
};

struct Scenario {
  std::string name;
  std::uint64_t frame_count = 0;
  int frame_width = 1920;
  int frame_height = 1080;
  double fps = 30.0;
  std::int64_t start_timestamp_ms = 0;
  std::optional<GeoMeta> geo;
  /// Must cover every frame.
  std::vector<ContextSegment> context_profile;
  std::vector<Entity> entities;
  std::vector<Activity> activities;
};

struct TruthRecord {
  std::uint64_t truth_id = 0;
  EventType type = EventType::meeting;
  FrameId trigger_frame = 0;
  FrameId end_frame = 0;
  std::vector<std::string> participants;
  friend bool operator==(const TruthRecord&, const TruthRecord&) = default;
};

struct SimulationResult {
  std::vector<FrameRecord> stream;
  std::vector<TruthRecord> truth;
};

/// Throws ValidationError whose message lists every violation found.
void validate(const Scenario& s);

/// Linear interpolation between keyframes, holding the end values outside.
Point2 entity_position(const Entity& e, FrameId frame);
bool entity_visible(const Entity& e, FrameId frame);

/// Entities after every activity has edited them, in script order.
std::vector<Entity> realize_activities(const Scenario& s);

/// Deterministic; validates first.
SimulationResult simulate(const Scenario& s);

struct NoiseParams {
  double jitter_sigma_px = 0.0;
  double drop_prob = 0.0;
  /// Expected spurious detections per frame.
  double false_positive_rate = 0.0;
  double confidence_sigma = 0.0;
  std::uint64_t seed = 0;
};

void validate(const NoiseParams& n);

/// Portable random source for the noise model. std::mt19937_64 is fully
/// specified by the standard; the transforms below are fixed here instead of
/// relying on the implementation-defined <random> distributions:
///  - uniform():  (next() >> 11) * 2^-53, in [0,1)
///  - normal():   Box-Muller, sqrt(-2 ln(1-u1)) * cos(2 pi u2), one value per
///                two uniforms
///  - poisson(l): Knuth's product method applied to chunks of at most 16
///                (the sum of independent Poisson variables is Poisson)
class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform();
  double normal(double mean, double sigma);
  std::uint64_t poisson(double lambda);

 private:
  std::mt19937_64 engine_;
};

/// Seeded perturbation. Per frame and per detection in order: one uniform for
/// the drop decision; survivors draw x, y, w, h jitter (if sigma > 0) and a
/// confidence perturbation (if confidence_sigma > 0). Then the frame draws a
/// Poisson count of false positives, each with class, width, height, center x,
/// center y and confidence. Boxes are clipped to the frame and dropped if
/// nothing remains. All-zero parameters return the input unchanged.
std::vector<FrameRecord> add_noise(std::span<const FrameRecord> stream, const NoiseParams& n);

}  // namespace fmv
