#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "litter/geo.hpp"
#include "litter/ids.hpp"
#include "litter/timeutil.hpp"

namespace litter {

enum class HeadingSource { true_north, magnetic, assumed };

std::string_view to_string(HeadingSource s) noexcept;

// Per-image camera pose. heading_deg is kept in [0, 360) and hfov_deg in
// (0, 180); pitch is positive when the camera tilts below the horizon.
struct CameraFix {
  Id image_id;
  GeoPoint position;
  double heading_deg = 0.0;
  HeadingSource heading_source = HeadingSource::assumed;
  double hfov_deg = 62.0;
  double pitch_deg = 0.0;
  std::optional<double> camera_height_m;
  std::uint32_t image_w_px = 1;
  std::uint32_t image_h_px = 1;
  std::optional<UtcTime> captured_at;
};

// tan of half the vertical field of view under square pixels.
double tan_half_vfov(const CameraFix& fix) noexcept;

nlohmann::ordered_json to_json(const CameraFix& fix);

}  // namespace litter
