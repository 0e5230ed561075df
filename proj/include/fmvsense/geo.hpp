#pragma once

// Flat-earth, north-referenced camera model: the frame center sits at
// (center_lat, center_lon), pixels are gsd meters square, and the image-up
// axis points heading_deg clockwise from true north.

#include <optional>

#include "fmvsense/events.hpp"
#include "fmvsense/model.hpp"

namespace fmv {

inline constexpr double kMetersPerDegree = 111320.0;
/// pixel_to_geo refuses center latitudes at or beyond this magnitude.
inline constexpr double kMaxAbsLatitude = 89.9;

/// Throws ValidationError when |center_lat| >= 89.9.
GeoPoint pixel_to_geo(const GeoMeta& g, double frame_w, double frame_h, Point2 px);

/// Analytic inverse of pixel_to_geo.
Point2 geo_to_pixel(const GeoMeta& g, double frame_w, double frame_h, GeoPoint p);

/// Sets ev.geo from the anchor box center; clears it when `g` is absent or
/// too close to a pole for the model.
Event geolocate_event(Event ev, const std::optional<GeoMeta>& g, double frame_w, double frame_h);

}  // namespace fmv
