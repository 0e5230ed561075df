#include "fmvsense/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fmvsense/error.hpp"

namespace fmv {

double bbox_area(const BBox& b) { return b.w * b.h; }

double bbox_intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

Point2 bbox_center(const BBox& b) { return {b.x + b.w / 2.0, b.y + b.h / 2.0}; }

double bbox_diagonal(const BBox& b) { return std::hypot(b.w, b.h); }

double iou(const BBox& a, const BBox& b) {
  // Areas from corner differences, the same arithmetic as the intersection,
  // so identical boxes give exactly 1.
  auto corner_area = [](const BBox& r) { return (r.right() - r.x) * (r.bottom() - r.y); };
  const double inter = bbox_intersection_area(a, b);
  const double uni = corner_area(a) + corner_area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BBox bbox_union(const BBox& a, const BBox& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.right(), b.right());
  const double y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

bool bbox_contains(const BBox& b, Point2 p) {
  return p.x >= b.x && p.x <= b.right() && p.y >= b.y && p.y <= b.bottom();
}

bool bbox_intersects_frame(const BBox& b, double frame_w, double frame_h) {
  return b.x <= frame_w && b.right() >= 0.0 && b.y <= frame_h && b.bottom() >= 0.0;
}

BBox bbox_clip(const BBox& b, double frame_w, double frame_h) {
  const double x0 = std::clamp(b.x, 0.0, frame_w);
  const double y0 = std::clamp(b.y, 0.0, frame_h);
  const double x1 = std::clamp(b.right(), 0.0, frame_w);
  const double y1 = std::clamp(b.bottom(), 0.0, frame_h);
  return {x0, y0, x1 - x0, y1 - y0};
}

namespace {

constexpr std::string_view kClassNames[] = {"person", "vehicle", "vessel", "building", "plane"};

}  // namespace

ObjectClass ObjectClass::from_name(std::string_view name) {
  if (name.empty()) throw ValidationError("object class name is empty");
  for (std::size_t i = 0; i < std::size(kClassNames); ++i) {
    if (name == kClassNames[i]) return ObjectClass(static_cast<ClassKind>(i));
  }
  ObjectClass c(ClassKind::other);
  c.other_name_ = std::string(name);
  return c;
}

std::string ObjectClass::name() const {
  if (kind_ == ClassKind::other) return other_name_;
  return std::string(kClassNames[static_cast<std::size_t>(kind_)]);
}

namespace {

void require(bool ok, std::string_view field, double value, std::string_view range) {
  if (ok) return;
  std::ostringstream os;
  os << "field '" << field << "': value " << value << " outside " << range;
  throw ValidationError(os.str());
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void validate(const GeoMeta& g) {
  require(finite(g.center_lat) && g.center_lat >= -90.0 && g.center_lat <= 90.0, "center_lat",
          g.center_lat, "[-90,90]");
  require(finite(g.center_lon) && g.center_lon >= -180.0 && g.center_lon <= 180.0, "center_lon",
          g.center_lon, "[-180,180]");
  require(finite(g.gsd_m_per_px) && g.gsd_m_per_px > 0.0, "gsd_m_per_px", g.gsd_m_per_px, "(0,inf)");
  require(finite(g.heading_deg) && g.heading_deg >= 0.0 && g.heading_deg < 360.0, "heading_deg",
          g.heading_deg, "[0,360)");
}

void validate(const ContextFeatures& f) {
  require(finite(f.altitude_m) && f.altitude_m >= 0.0, "altitude_m", f.altitude_m, "[0,inf)");
  require(finite(f.water_fraction) && f.water_fraction >= 0.0 && f.water_fraction <= 1.0,
          "water_fraction", f.water_fraction, "[0,1]");
  require(finite(f.clutter_score) && f.clutter_score >= 0.0 && f.clutter_score <= 1.0,
          "clutter_score", f.clutter_score, "[0,1]");
}

void validate(const FrameRecord& r) {
  require(r.width > 0, "width", r.width, "(0,inf)");
  require(r.height > 0, "height", r.height, "(0,inf)");
  if (r.geo) validate(*r.geo);
  if (r.features) validate(*r.features);
  if (r.context_logits) {
    for (double z : *r.context_logits) require(finite(z), "context_logits", z, "finite reals");
  }
  for (const Detection& d : r.detections) {
    require(finite(d.confidence) && d.confidence >= 0.0 && d.confidence <= 1.0, "confidence",
            d.confidence, "[0,1]");
    const BBox& b = d.bbox;
    require(finite(b.x) && finite(b.y), "bbox", finite(b.x) ? b.y : b.x, "finite reals");
    require(finite(b.w) && b.w >= 0.0, "bbox.w", b.w, "[0,inf)");
    require(finite(b.h) && b.h >= 0.0, "bbox.h", b.h, "[0,inf)");
    if (d.tile) {
      require(*d.tile >= 0, "tile", *d.tile, "[0,inf)");
    } else if (!bbox_intersects_frame(b, r.width, r.height)) {
      throw ValidationError("field 'bbox': box does not intersect the frame rectangle");
    }
  }
}

}  // namespace fmv
