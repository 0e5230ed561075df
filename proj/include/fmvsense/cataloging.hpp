#pragma once

// Object cataloging around an external detector: multi-scale tile planning,
// tile-to-frame coordinate mapping, per-class confidence and size gates,
// cross-tile duplicate suppression, and the focal loss formula.

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fmvsense/model.hpp"

namespace fmv {

/// Per-class acceptance gate. Sizes are box areas in square frame pixels.
/// The `*_frame_frac` bounds are relative to the frame area and are folded
/// into the pixel bounds by resolve_for_frame().
struct ClassGate {
  double min_confidence = 0.0;
  double min_area_px2 = 0.0;
  std::optional<double> max_area_px2;  // unbounded when empty
  std::optional<double> max_area_frame_frac;
  friend bool operator==(const ClassGate&, const ClassGate&) = default;
};

struct DetectorConfig {
  /// Tile pixels per frame pixel, one pyramid level per entry.
  std::vector<double> scales{1.0};
  int tile_size = 1024;
  double overlap_frac = 0.2;
  std::map<ObjectClass, ClassGate> class_gates;
  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

void validate(const ClassGate& g);
void validate(const DetectorConfig& cfg);

/// Copy of `cfg` whose gates carry absolute pixel bounds for the given frame.
DetectorConfig resolve_for_frame(const DetectorConfig& cfg, int frame_w, int frame_h);

struct Tile {
  int index = 0;
  /// Top-left corner in frame pixels.
  double origin_x = 0.0;
  double origin_y = 0.0;
  /// Extent in tile (scaled) pixels; smaller than tile_size when clamped.
  int width = 0;
  int height = 0;
  double scale = 1.0;
  friend bool operator==(const Tile&, const Tile&) = default;
};

struct TilePlan {
  std::vector<Tile> tiles;
};

/// Lays tiles of side tile_size over each scaled frame with stride
/// floor(tile_size * (1 - overlap_frac)); the last row and column are pulled
/// back so they end exactly at the frame edge.
TilePlan plan_pyramid(int frame_w, int frame_h, const DetectorConfig& cfg);

/// Tile-local box to frame coordinates. Throws ValidationError if scale <= 0.
Detection map_tile_to_frame(const Detection& d, const Tile& tile);
/// Inverse of map_tile_to_frame.
Detection map_frame_to_tile(const Detection& d, const Tile& tile);

/// Keeps detections whose class has a gate and that pass it; order preserved.
std::vector<Detection> apply_gates(std::span<const Detection> dets, const DetectorConfig& cfg);

/// Class-aware greedy NMS. Candidates are visited by confidence descending,
/// then smaller area, then input order; the output is in visiting order.
std::vector<Detection> nms_merge(std::span<const Detection> dets, double iou_threshold);

/// (1 - p)^gamma * -ln(p). Throws ValidationError unless 0 < p <= 1 and gamma >= 0.
double focal_loss(double p, double gamma);

}  // namespace fmv
