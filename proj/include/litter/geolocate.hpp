#pragma once

#include <string>
#include <string_view>

#include "litter/annotations.hpp"
#include "litter/camera.hpp"
#include "litter/config.hpp"

namespace litter {

enum class DistanceMethod { fixed_distance, ground_plane };

std::string_view to_string(DistanceMethod m) noexcept;

// Depression angles at or below this are treated as the horizon.
inline constexpr double kMinDepressionDeg = 0.5;
inline constexpr double kMinRangeM = 0.5;
inline constexpr double kMaxRangeM = 100.0;

struct RangeEstimate {
  double distance_m = 0.0;
  DistanceMethod method = DistanceMethod::fixed_distance;
};

// A detection placed on the map.
struct GeoDetection {
  Id image_id;
  Id annotation_id;
  std::string target_class;
  double score = 0.0;
  double bearing_deg = 0.0;
  double distance_m = 0.0;
  DistanceMethod method = DistanceMethod::fixed_distance;
  GeoPoint position;

  friend bool operator==(const GeoDetection&, const GeoDetection&) = default;
};

// Orders by (image_id, annotation_id), the canonical output order.
bool source_less(const GeoDetection& a, const GeoDetection& b) noexcept;

// Horizontal angle of pixel column u off the optical axis, pinhole model:
// atan((2u/W - 1) tan(hfov/2)). Requires 0 <= u <= W.
double pixel_offset_deg(const CameraFix& fix, double u) noexcept;

// heading + pixel_offset_deg, normalised to [0, 360).
double pixel_bearing(const CameraFix& fix, double u) noexcept;

// Angle below the horizon of pixel row v, including camera pitch.
double pixel_depression_deg(const CameraFix& fix, double v) noexcept;

// Ground-plane range from the bbox bottom edge when the fix carries a camera
// height and the base sits clearly below the horizon; otherwise the fixed
// default. Always within [0.5, 100] m.
RangeEstimate estimate_distance(const CameraFix& fix, const Detection& det, const PipelineConfig& cfg);

// Bearing from the bbox horizontal centre, range from estimate_distance,
// position by the spherical direct problem.
GeoDetection locate_detection(const CameraFix& fix, const Detection& det, const CategoryMapping& mapping,
                              const PipelineConfig& cfg);

}  // namespace litter
