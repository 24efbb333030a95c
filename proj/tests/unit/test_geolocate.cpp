#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "litter/error.hpp"
#include "litter/geolocate.hpp"
#include "litter/synth.hpp"

using namespace litter;

namespace {

CameraFix make_fix(double heading = 0.0, double hfov = 62.0) {
  CameraFix f;
  f.image_id = Id(std::int64_t{1});
  f.position = {38.5616, -121.4244};
  f.heading_deg = heading;
  f.heading_source = HeadingSource::true_north;
  f.hfov_deg = hfov;
  f.camera_height_m = 1.4;
  f.image_w_px = 4000;
  f.image_h_px = 3000;
  return f;
}

Detection det_at(double u, double v_bottom, double w = 40, double h = 40) {
  Detection d;
  d.annotation_id = Id(std::int64_t{1});
  d.image_id = Id(std::int64_t{1});
  d.category_id = 1;
  d.score = 0.9;
  d.bbox = {u - w / 2, v_bottom - h, w, h};
  return d;
}

CategoryMapping mapping() {
  Taxonomy t;
  t.categories[1] = {"Drink can", "Can"};
  t.counts["Can"] = 1;
  return consolidate(t);
}

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

TEST(Bearing, AxisAndConeEdges) {
  for (double heading : {0.0, 90.0, 359.0}) {
    const CameraFix fix = make_fix(heading);
    EXPECT_EQ(pixel_bearing(fix, fix.image_w_px / 2.0), heading);
    EXPECT_DOUBLE_EQ(pixel_offset_deg(fix, 0), -fix.hfov_deg / 2);
    EXPECT_DOUBLE_EQ(pixel_offset_deg(fix, fix.image_w_px), fix.hfov_deg / 2);
  }
}

TEST(Bearing, QuarterWidthAtNinetyDegrees) {
  const CameraFix fix = make_fix(0.0, 90.0);
  EXPECT_NEAR(pixel_offset_deg(fix, 0.75 * fix.image_w_px), 26.565, 0.001);
  EXPECT_NEAR(pixel_bearing(fix, 0.25 * fix.image_w_px), 360 - 26.565, 0.001);
}

TEST(Bearing, MonotoneAcrossTheFrame) {
  const CameraFix fix = make_fix(10.0, 75.0);
  double prev = -1e9;
  for (double u = 0; u <= fix.image_w_px; u += 0.5) {
    const double off = pixel_offset_deg(fix, u);
    EXPECT_GT(off, prev);
    EXPECT_LE(std::abs(off), fix.hfov_deg / 2);
    prev = off;
  }
}

TEST(Range, GroundPlaneByHand) {
  CameraFix fix = make_fix();
  // Pick the row whose net depression is exactly 10 degrees.
  const double t = std::tan(10 * kDeg) / tan_half_vfov(fix);
  const double v = fix.image_h_px / 2.0 * (1 + t);
  EXPECT_NEAR(pixel_depression_deg(fix, v), 10.0, 1e-9);
  const RangeEstimate r = estimate_distance(fix, det_at(2000, v), PipelineConfig{});
  EXPECT_EQ(r.method, DistanceMethod::ground_plane);
  EXPECT_NEAR(r.distance_m, 1.4 / std::tan(10 * kDeg), 1e-9);
  EXPECT_NEAR(r.distance_m, 7.94, 0.01);
}

TEST(Range, PitchAddsToDepression) {
  CameraFix fix = make_fix();
  fix.pitch_deg = 4.0;
  EXPECT_NEAR(pixel_depression_deg(fix, fix.image_h_px / 2.0), 4.0, 1e-12);
  const RangeEstimate r = estimate_distance(fix, det_at(2000, fix.image_h_px / 2.0), PipelineConfig{});
  EXPECT_NEAR(r.distance_m, 1.4 / std::tan(4 * kDeg), 1e-9);
}

TEST(Range, HorizonAndDisabledFallBack) {
  const CameraFix fix = make_fix();
  PipelineConfig cfg;
  for (double v : {0.0, 1000.0, 1500.0}) {
    const RangeEstimate r = estimate_distance(fix, det_at(2000, v), cfg);
    EXPECT_EQ(r.method, DistanceMethod::fixed_distance) << v;
    EXPECT_DOUBLE_EQ(r.distance_m, 6.1);
  }
  CameraFix flat = fix;
  flat.camera_height_m.reset();
  for (double v : {1600.0, 2500.0, 3000.0}) {
    const RangeEstimate r = estimate_distance(flat, det_at(2000, v), cfg);
    EXPECT_EQ(r.method, DistanceMethod::fixed_distance);
    EXPECT_DOUBLE_EQ(r.distance_m, 6.1);
  }
}

TEST(Range, AlwaysWithinClamp) {
  CameraFix fix = make_fix();
  fix.camera_height_m = 50.0;
  fix.pitch_deg = 60.0;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = static_cast<double>(rng() % 3001);
    const RangeEstimate r = estimate_distance(fix, det_at(2000, v), PipelineConfig{});
    EXPECT_GE(r.distance_m, kMinRangeM);
    EXPECT_LE(r.distance_m, kMaxRangeM);
  }
}

TEST(Locate, CentredFixedDistanceGoesNorth) {
  CameraFix fix = make_fix(0.0);
  fix.camera_height_m.reset();
  const GeoDetection g = locate_detection(fix, det_at(2000, 2500), mapping(), PipelineConfig{});
  EXPECT_EQ(g.method, DistanceMethod::fixed_distance);
  EXPECT_DOUBLE_EQ(g.bearing_deg, 0.0);
  EXPECT_NEAR(haversine_distance(fix.position, g.position), 6.1, 1e-9);
  EXPECT_NEAR(g.position.lon_deg, fix.position.lon_deg, 1e-12);
  EXPECT_GT(g.position.lat_deg, fix.position.lat_deg);
  EXPECT_EQ(g.target_class, "Can");
}

TEST(Locate, TenMetresDueEast) {
  CameraFix fix = make_fix(90.0);
  // Base row for a point 10 m away on flat ground.
  const double v = fix.image_h_px / 2.0 * (1 + std::tan(std::atan(1.4 / 10.0)) / tan_half_vfov(fix));
  const GeoDetection g = locate_detection(fix, det_at(2000, v), mapping(), PipelineConfig{});
  EXPECT_EQ(g.method, DistanceMethod::ground_plane);
  EXPECT_NEAR(haversine_distance(fix.position, g.position), 10.0, 1e-6);
  EXPECT_NEAR(initial_bearing(fix.position, g.position), 90.0, 1e-6);
  const GeoPoint east = nvector_destination(fix.position, 90.0, 10.0);
  EXPECT_LT(haversine_distance(east, g.position), 1e-6);
}

TEST(Locate, LeftEdgeSitsOnTheCone) {
  const CameraFix fix = make_fix(30.0);
  const GeoDetection g = locate_detection(fix, det_at(20, 2500), mapping(), PipelineConfig{});
  // bbox centre at u = 20; also check the clamped u = 0 case.
  Detection edge = det_at(0, 2500);
  edge.bbox = {0, 2400, 0.0001, 100};
  const GeoDetection e = locate_detection(fix, edge, mapping(), PipelineConfig{});
  EXPECT_NEAR(bearing_difference(e.bearing_deg, 30.0 - fix.hfov_deg / 2), 0.0, 1e-6);
  EXPECT_LE(std::abs(bearing_difference(g.bearing_deg, fix.heading_deg)), fix.hfov_deg / 2);
}

TEST(Locate, ConeContainmentRandomised) {
  std::mt19937_64 rng(8);
  const auto m = mapping();
  for (int i = 0; i < 3000; ++i) {
    CameraFix fix = make_fix(static_cast<double>(rng() % 36000) / 100.0, 20 + static_cast<double>(rng() % 140));
    const double u = static_cast<double>(rng() % 4001);
    const double v = static_cast<double>(rng() % 3001);
    Detection d = det_at(u, v, 2, 2);
    d.bbox.x = std::max(0.0, std::min(d.bbox.x, 3998.0));
    d.bbox.y = std::max(0.0, d.bbox.y);
    const GeoDetection g = locate_detection(fix, d, m, PipelineConfig{});
    EXPECT_LE(std::abs(bearing_difference(g.bearing_deg, fix.heading_deg)), fix.hfov_deg / 2 + 1e-9);
    EXPECT_TRUE(is_valid(g.position));
  }
}
