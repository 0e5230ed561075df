#include <gtest/gtest.h>

#include <cmath>

#include "fmvsense/error.hpp"
#include "fmvsense/geo.hpp"
#include "test_support.hpp"

namespace fmv {
namespace {

constexpr double kOffset = 100.0 * 0.5 / 111320.0;  // 100 px at 0.5 m/px

TEST(PixelToGeo, CenterMapsExactly) {
  const GeoMeta g{34.0522, -118.2437, 0.3, 37.0};
  const GeoPoint p = pixel_to_geo(g, 1920, 1080, {960, 540});
  EXPECT_EQ(p.lat, g.center_lat);
  EXPECT_EQ(p.lon, g.center_lon);
}

TEST(PixelToGeo, EastOffsetHeadingZero) {
  const GeoMeta g{0.0, 10.0, 0.5, 0.0};
  const GeoPoint p = pixel_to_geo(g, 1000, 1000, {600, 500});
  EXPECT_NEAR(p.lon - 10.0, 4.4915e-4, 1e-8);
  EXPECT_NEAR(p.lon - 10.0, kOffset, 1e-15);
  EXPECT_EQ(p.lat, 0.0);
}

TEST(PixelToGeo, HeadingNinetyPointsImageRightSouth) {
  const GeoMeta g{0.0, 10.0, 0.5, 90.0};
  const GeoPoint p = pixel_to_geo(g, 1000, 1000, {600, 500});
  EXPECT_NEAR(p.lat, -kOffset, 1e-15);
  EXPECT_NEAR(p.lon, 10.0, 1e-15);
}

TEST(PixelToGeo, RejectsPolarCenter) {
  EXPECT_THROW(pixel_to_geo({89.95, 0.0, 1.0, 0.0}, 100, 100, {0, 0}), ValidationError);
  EXPECT_THROW(pixel_to_geo({-89.9, 0.0, 1.0, 0.0}, 100, 100, {0, 0}), ValidationError);
}

TEST(PixelToGeo, RoundTripRandomPixels) {
  testing::Gen gen(51);
  for (int k = 0; k < 1000; ++k) {
    const GeoMeta g{gen.real(-60, 60), gen.real(-180, 180), gen.real(0.05, 2.0), gen.real(0, 360)};
    const double w = gen.integer(64, 4096), h = gen.integer(64, 4096);
    const Point2 px{gen.real(0, w), gen.real(0, h)};
    const GeoPoint p = pixel_to_geo(g, w, h, px);
    const Point2 back = geo_to_pixel(g, w, h, p);
    EXPECT_NEAR(back.x, px.x, 1e-6);
    EXPECT_NEAR(back.y, px.y, 1e-6);
    const GeoPoint again = pixel_to_geo(g, w, h, back);
    EXPECT_NEAR(again.lat, p.lat, 1e-6);
    EXPECT_NEAR(std::remainder(again.lon - p.lon, 360.0), 0.0, 1e-6);
  }
}

TEST(PixelToGeo, HeadingIsPeriodic) {
  const GeoPoint a = pixel_to_geo({12.0, 45.0, 0.4, 0.0}, 800, 600, {123, 456});
  const GeoPoint b = pixel_to_geo({12.0, 45.0, 0.4, 360.0 - 1e-9}, 800, 600, {123, 456});
  EXPECT_NEAR(a.lat, b.lat, 1e-12);
  EXPECT_NEAR(a.lon, b.lon, 1e-12);
}

TEST(PixelToGeo, LinearInPixelOffsets) {
  const GeoMeta g{-33.9, 151.2, 0.7, 215.0};
  const GeoPoint o = pixel_to_geo(g, 1000, 800, {500, 400});
  const GeoPoint a = pixel_to_geo(g, 1000, 800, {530, 380});
  const GeoPoint b = pixel_to_geo(g, 1000, 800, {560, 360});
  EXPECT_NEAR(b.lat - o.lat, 2.0 * (a.lat - o.lat), 1e-12);
  EXPECT_NEAR(b.lon - o.lon, 2.0 * (a.lon - o.lon), 1e-12);
}

TEST(GeolocateEvent, UsesAnchorCenterAndDegrades) {
  Event ev;
  ev.anchor_bbox = {590, 490, 20, 20};
  const GeoMeta g{0.0, 10.0, 0.5, 0.0};
  const Event located = geolocate_event(ev, g, 1000, 1000);
  ASSERT_TRUE(located.geo);
  EXPECT_NEAR(located.geo->lon - 10.0, kOffset, 1e-15);

  EXPECT_FALSE(geolocate_event(ev, std::nullopt, 1000, 1000).geo);
  EXPECT_FALSE(geolocate_event(ev, GeoMeta{89.95, 0, 1, 0}, 1000, 1000).geo);
}

}  // namespace
}  // namespace fmv
