#pragma once

// Synthetic scenes with known litter positions: the independent oracle for
// the geolocation geometry. Planting uses an n-vector rotation and
// projection uses the haversine/initial-bearing inverse, so neither shares
// code with the forward placement path it checks.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "litter/annotations.hpp"
#include "litter/camera.hpp"
#include "litter/config.hpp"
#include "litter/geo.hpp"

namespace litter {

struct PlantedPoint {
  Id image_id;
  Id annotation_id;
  GeoPoint position;
  std::string target_class;
  double distance_m = 0.0;
};

struct SceneOptions {
  std::size_t n_cameras = 4;
  double min_range_m = 0.5;
  double max_range_m = 30.0;
  std::uint32_t image_w_px = 1920;
  std::uint32_t image_h_px = 1080;
  double object_width_m = 0.3;
  double object_height_m = 0.2;
  double score = 0.9;
  // Noise, off by default. Both are half-widths of uniform perturbations.
  double pixel_jitter_px = 0.0;
  double heading_error_deg = 0.0;
};

struct SyntheticScene {
  std::uint64_t seed = 0;
  PipelineConfig config;
  std::vector<CameraFix> fixes;
  std::vector<PlantedPoint> planted;
  // One detection per planted point, same order.
  CocoDocument detections;
};

struct PixelFootprint {
  double u = 0.0;
  double v_bottom = 0.0;
};

// Pixel column of the point's bearing and pixel row of its base on flat
// ground. Throws Error(out_of_cone) when the bearing leaves the horizontal
// field of view and Error(out_of_range) when the distance is outside
// [0.5, 100] m, the camera has no height, or the base falls outside the frame.
PixelFootprint project_to_pixel(const CameraFix& fix, const GeoPoint& point, const PipelineConfig& cfg);

// Point reached by rotating the origin's unit vector along the great circle.
GeoPoint nvector_destination(const GeoPoint& origin, double bearing_deg, double distance_m,
                             double radius_m = kMeanEarthRadiusM);

// Deterministic for a given seed. Requires cfg.camera_height_m.
SyntheticScene generate_scene(std::uint64_t seed, std::size_t n_points, const GeoRect& area, const PipelineConfig& cfg,
                              const SceneOptions& options = {});

struct ErrorStats {
  std::size_t count = 0;
  double mean_m = 0.0;
  double max_m = 0.0;
  double p95_m = 0.0;
};

// Per planted point: distance between the planted position and where the
// pipeline places its detection. Camera height is taken from `cfg`, as the
// pipeline does for sidecar imagery.
std::vector<double> roundtrip_errors(const SyntheticScene& scene, const PipelineConfig& cfg);

ErrorStats summarize_errors(std::span<const double> errors);

ErrorStats roundtrip_error(const SyntheticScene& scene, const PipelineConfig& cfg);

// Bundle of config, sidecar cameras, COCO detections and planted truth.
nlohmann::ordered_json to_json(const SyntheticScene& scene);
SyntheticScene scene_from_json(const nlohmann::json& doc);

nlohmann::ordered_json to_json(const ErrorStats& stats);

// Roughly 1 km square around 38.56 N, 121.42 W.
GeoRect default_scene_area() noexcept;

}  // namespace litter
