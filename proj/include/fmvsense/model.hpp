#pragma once

// Shared value types of the pipeline: boxes, classes, detections and the
// per-frame stream record. Coordinates are pixels with a top-left origin,
// x to the right and y downward.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fmv {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Axis-aligned box in corner form (left, top, width, height).
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  friend bool operator==(const BBox&, const BBox&) = default;
};

double bbox_area(const BBox& b);
double bbox_intersection_area(const BBox& a, const BBox& b);
Point2 bbox_center(const BBox& b);
double bbox_diagonal(const BBox& b);
/// Intersection over union; 0 when both boxes are degenerate.
double iou(const BBox& a, const BBox& b);
/// Smallest box enclosing both.
BBox bbox_union(const BBox& a, const BBox& b);
/// Closed-interval containment test.
bool bbox_contains(const BBox& b, Point2 p);
/// True when the box touches the closed frame rectangle [0,w]x[0,h].
bool bbox_intersects_frame(const BBox& b, double frame_w, double frame_h);
/// Clips to the frame rectangle; the result may be degenerate.
BBox bbox_clip(const BBox& b, double frame_w, double frame_h);

enum class ClassKind : std::uint8_t { person, vehicle, vessel, building, plane, other };

/// Object class: a closed set used by event rules plus an open `other(name)`
/// escape hatch that is carried through the pipeline but never triggers events.
class ObjectClass {
 public:
  ObjectClass() = default;
  ObjectClass(ClassKind kind) : kind_(kind) {}  // NOLINT(google-explicit-constructor)

  /// Maps a known name onto its kind, anything else onto other(name).
  /// Throws ValidationError on an empty name.
  static ObjectClass from_name(std::string_view name);
  static ObjectClass other(std::string_view name) { return from_name(name); }

  ClassKind kind() const { return kind_; }
  bool is_other() const { return kind_ == ClassKind::other; }
  std::string name() const;

  friend auto operator<=>(const ObjectClass&, const ObjectClass&) = default;
  friend bool operator==(const ObjectClass&, const ObjectClass&) = default;

 private:
  ClassKind kind_ = ClassKind::person;
  std::string other_name_;
};

struct Detection {
  ObjectClass cls;
  BBox bbox;
  double confidence = 1.0;
  /// Set when the box is in tile-local coordinates of the given tile index.
  std::optional<int> tile;
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GeoMeta {
  double center_lat = 0.0;
  double center_lon = 0.0;
  double gsd_m_per_px = 1.0;
  /// Image-up direction, degrees clockwise from true north.
  double heading_deg = 0.0;
  friend bool operator==(const GeoMeta&, const GeoMeta&) = default;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct ContextFeatures {
  double altitude_m = 0.0;
  double water_fraction = 0.0;
  double clutter_score = 0.0;
  friend bool operator==(const ContextFeatures&, const ContextFeatures&) = default;
};

inline constexpr std::size_t kContextLabelCount = 5;

struct FrameRecord {
  std::uint64_t frame_id = 0;
  std::int64_t timestamp_ms = 0;
  int width = 0;
  int height = 0;
  std::optional<GeoMeta> geo;
  std::optional<ContextFeatures> features;
  std::optional<std::array<double, kContextLabelCount>> context_logits;
  std::vector<Detection> detections;
  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

void validate(const GeoMeta& g);
void validate(const ContextFeatures& f);
/// Checks the record's own invariants (not stream monotonicity).
void validate(const FrameRecord& r);

}  // namespace fmv
