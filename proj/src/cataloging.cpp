#include "fmvsense/cataloging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fmvsense/error.hpp"

namespace fmv {

void validate(const ClassGate& g) {
  if (!std::isfinite(g.min_confidence) || g.min_confidence < 0.0 || g.min_confidence > 1.0)
    throw ValidationError("field 'min_confidence' outside [0,1]");
  if (!std::isfinite(g.min_area_px2) || g.min_area_px2 < 0.0)
    throw ValidationError("field 'min_area_px2' must be >= 0");
  if (g.max_area_px2 && !(*g.max_area_px2 > g.min_area_px2))
    throw ValidationError("field 'max_area_px2' must exceed min_area_px2");
  if (g.max_area_frame_frac && !(*g.max_area_frame_frac > 0.0 && *g.max_area_frame_frac <= 1.0))
    throw ValidationError("field 'max_area_frame_frac' outside (0,1]");
}

void validate(const DetectorConfig& cfg) {
  if (cfg.scales.empty()) throw ValidationError("field 'scales' is empty");
  for (double s : cfg.scales) {
    if (!std::isfinite(s) || s <= 0.0) throw ValidationError("field 'scales' has a non-positive entry");
  }
  if (cfg.tile_size <= 0) throw ValidationError("field 'tile_size' must be > 0");
  if (!std::isfinite(cfg.overlap_frac) || cfg.overlap_frac < 0.0 || cfg.overlap_frac > 0.9)
    throw ValidationError("field 'overlap_frac' outside [0,0.9]");
  for (const auto& [cls, gate] : cfg.class_gates) {
    try {
      validate(gate);
    } catch (const ValidationError& e) {
      throw ValidationError("gate '" + cls.name() + "': " + e.what());
    }
  }
}

DetectorConfig resolve_for_frame(const DetectorConfig& cfg, int frame_w, int frame_h) {
  DetectorConfig out = cfg;
  const double frame_area = static_cast<double>(frame_w) * static_cast<double>(frame_h);
  for (auto& [cls, gate] : out.class_gates) {
    if (!gate.max_area_frame_frac) continue;
    const double bound = *gate.max_area_frame_frac * frame_area;
    gate.max_area_px2 = gate.max_area_px2 ? std::min(*gate.max_area_px2, bound) : bound;
    gate.max_area_frame_frac.reset();
  }
  return out;
}

namespace {

// Offsets along one axis: 0, stride, 2*stride, ... with the last pulled back
// to end at `extent`.
std::vector<int> axis_offsets(int extent, int tile, int stride) {
  std::vector<int> out{0};
  int o = 0;
  while (o + tile < extent) {
    o += stride;
    if (o + tile > extent) o = extent - tile;
    out.push_back(o);
  }
  return out;
}

}  // namespace

TilePlan plan_pyramid(int frame_w, int frame_h, const DetectorConfig& cfg) {
  if (frame_w <= 0 || frame_h <= 0) throw ValidationError("frame dimensions must be > 0");
  validate(cfg);
  const int stride = std::max(1, static_cast<int>(std::floor(cfg.tile_size * (1.0 - cfg.overlap_frac))));

  TilePlan plan;
  for (double s : cfg.scales) {
    const int sw = std::max(1, static_cast<int>(std::ceil(frame_w * s - 1e-9)));
    const int sh = std::max(1, static_cast<int>(std::ceil(frame_h * s - 1e-9)));
    const int tw = std::min(cfg.tile_size, sw);
    const int th = std::min(cfg.tile_size, sh);
    for (int oy : axis_offsets(sh, th, stride)) {
      for (int ox : axis_offsets(sw, tw, stride)) {
        Tile t;
        t.index = static_cast<int>(plan.tiles.size());
        t.origin_x = ox / s;
        t.origin_y = oy / s;
        t.width = tw;
        t.height = th;
        t.scale = s;
        plan.tiles.push_back(t);
      }
    }
  }
  return plan;
}

Detection map_tile_to_frame(const Detection& d, const Tile& tile) {
  if (!(tile.scale > 0.0)) throw ValidationError("tile scale must be > 0");
  Detection out = d;
  out.bbox = {tile.origin_x + d.bbox.x / tile.scale, tile.origin_y + d.bbox.y / tile.scale,
              d.bbox.w / tile.scale, d.bbox.h / tile.scale};
  out.tile.reset();
  return out;
}

Detection map_frame_to_tile(const Detection& d, const Tile& tile) {
  if (!(tile.scale > 0.0)) throw ValidationError("tile scale must be > 0");
  Detection out = d;
  out.bbox = {(d.bbox.x - tile.origin_x) * tile.scale, (d.bbox.y - tile.origin_y) * tile.scale,
              d.bbox.w * tile.scale, d.bbox.h * tile.scale};
  out.tile = tile.index;
  return out;
}

std::vector<Detection> apply_gates(std::span<const Detection> dets, const DetectorConfig& cfg) {
  std::vector<Detection> out;
  for (const Detection& d : dets) {
    const auto it = cfg.class_gates.find(d.cls);
    if (it == cfg.class_gates.end()) continue;
    const ClassGate& g = it->second;
    const double area = bbox_area(d.bbox);
    if (d.confidence < g.min_confidence) continue;
    if (area < g.min_area_px2) continue;
    if (g.max_area_px2 && area > *g.max_area_px2) continue;
    out.push_back(d);
  }
  return out;
}

std::vector<Detection> nms_merge(std::span<const Detection> dets, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].confidence != dets[b].confidence) return dets[a].confidence > dets[b].confidence;
    return bbox_area(dets[a].bbox) < bbox_area(dets[b].bbox);
  });

  std::vector<Detection> kept;
  for (std::size_t i : order) {
    const Detection& d = dets[i];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.cls == d.cls && iou(k.bbox, d.bbox) >= iou_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

double focal_loss(double p, double gamma) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("focal_loss: p must be in (0,1]");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("focal_loss: gamma must be >= 0");
  if (p == 1.0) return 0.0;
  return std::pow(1.0 - p, gamma) * -std::log(p);
}

}  // namespace fmv
