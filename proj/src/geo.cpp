#include "fmvsense/geo.hpp"

#include <cmath>
#include <numbers>

#include "fmvsense/error.hpp"

namespace fmv {

namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

void check_latitude(const GeoMeta& g) {
  if (!(std::abs(g.center_lat) < kMaxAbsLatitude)) {
    throw ValidationError("geolocation model is invalid at |center_lat| >= 89.9");
  }
}

double wrap_lon(double lon) {
  if (lon > 180.0) return lon - 360.0;
  if (lon < -180.0) return lon + 360.0;
  return lon;
}

}  // namespace

GeoPoint pixel_to_geo(const GeoMeta& g, double frame_w, double frame_h, Point2 px) {
  check_latitude(g);
  const double e = (px.x - frame_w / 2.0) * g.gsd_m_per_px;
  const double n = (frame_h / 2.0 - px.y) * g.gsd_m_per_px;
  const double th = radians(g.heading_deg);
  const double east = e * std::cos(th) + n * std::sin(th);
  const double north = n * std::cos(th) - e * std::sin(th);
  return {g.center_lat + north / kMetersPerDegree,
          wrap_lon(g.center_lon + east / (kMetersPerDegree * std::cos(radians(g.center_lat))))};
}

Point2 geo_to_pixel(const GeoMeta& g, double frame_w, double frame_h, GeoPoint p) {
  check_latitude(g);
  const double north = (p.lat - g.center_lat) * kMetersPerDegree;
  const double east = wrap_lon(p.lon - g.center_lon) * kMetersPerDegree * std::cos(radians(g.center_lat));
  const double th = radians(g.heading_deg);
  const double e = east * std::cos(th) - north * std::sin(th);
  const double n = east * std::sin(th) + north * std::cos(th);
  return {frame_w / 2.0 + e / g.gsd_m_per_px, frame_h / 2.0 - n / g.gsd_m_per_px};
}

Event geolocate_event(Event ev, const std::optional<GeoMeta>& g, double frame_w, double frame_h) {
  if (!g || !(std::abs(g->center_lat) < kMaxAbsLatitude)) {
    ev.geo.reset();
    return ev;
  }
  ev.geo = pixel_to_geo(*g, frame_w, frame_h, bbox_center(ev.anchor_bbox));
  return ev;
}

}  // namespace fmv
