#include "litter/geolocate.hpp"

#include <algorithm>
#include <cmath>

#include "litter/error.hpp"

namespace litter {

std::string_view to_string(DistanceMethod m) noexcept {
  return m == DistanceMethod::ground_plane ? "ground-plane" : "fixed-distance";
}

bool source_less(const GeoDetection& a, const GeoDetection& b) noexcept {
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return a.annotation_id < b.annotation_id;
}

double pixel_offset_deg(const CameraFix& fix, double u) noexcept {
  const double ndc = 2.0 * u / static_cast<double>(fix.image_w_px) - 1.0;
  const double half = fix.hfov_deg / 2.0;
  return std::clamp(rad_to_deg(std::atan(ndc * std::tan(deg_to_rad(half)))), -half, half);
}

double pixel_bearing(const CameraFix& fix, double u) noexcept {
  return normalize_bearing(fix.heading_deg + pixel_offset_deg(fix, u));
}

double pixel_depression_deg(const CameraFix& fix, double v) noexcept {
  const double ndc = 2.0 * v / static_cast<double>(fix.image_h_px) - 1.0;
  return fix.pitch_deg + rad_to_deg(std::atan(ndc * tan_half_vfov(fix)));
}

RangeEstimate estimate_distance(const CameraFix& fix, const Detection& det, const PipelineConfig& cfg) {
  RangeEstimate r{cfg.default_distance_m, DistanceMethod::fixed_distance};
  if (fix.camera_height_m) {
    const double alpha = pixel_depression_deg(fix, det.bbox.bottom());
    if (alpha > kMinDepressionDeg) {
      r.distance_m = *fix.camera_height_m / std::tan(deg_to_rad(alpha));
      r.method = DistanceMethod::ground_plane;
    }
  }
  r.distance_m = std::clamp(r.distance_m, kMinRangeM, kMaxRangeM);
  return r;
}

GeoDetection locate_detection(const CameraFix& fix, const Detection& det, const CategoryMapping& mapping,
                              const PipelineConfig& cfg) {
  if (!is_valid(fix.position)) throw Error(Errc::no_geotag, "camera fix for image " + fix.image_id.str() + " has no valid position");
  const double u = std::clamp(det.bbox.center_x(), 0.0, static_cast<double>(fix.image_w_px));
  const RangeEstimate range = estimate_distance(fix, det, cfg);

  GeoDetection g;
  g.image_id = det.image_id;
  g.annotation_id = det.annotation_id;
  g.target_class = mapping.target_of(det.category_id);
  g.score = det.score;
  g.bearing_deg = pixel_bearing(fix, u);
  g.distance_m = range.distance_m;
  g.method = range.method;
  g.position = geodesic_destination(fix.position, g.bearing_deg, g.distance_m, cfg.earth_radius_m);
  return g;
}

}  // namespace litter
