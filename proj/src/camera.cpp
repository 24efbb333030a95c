#include "litter/camera.hpp"

#include <cmath>

namespace litter {

std::string_view to_string(HeadingSource s) noexcept {
  switch (s) {
    case HeadingSource::true_north: return "true-north";
    case HeadingSource::magnetic: return "magnetic";
    case HeadingSource::assumed: return "assumed";
  }
  return "assumed";
}

double tan_half_vfov(const CameraFix& fix) noexcept {
  return std::tan(deg_to_rad(fix.hfov_deg) / 2.0) * static_cast<double>(fix.image_h_px) /
         static_cast<double>(fix.image_w_px);
}

nlohmann::ordered_json to_json(const CameraFix& fix) {
  nlohmann::ordered_json j;
  j["image_id"] = id_to_json(fix.image_id);
  j["lat"] = fix.position.lat_deg;
  j["lon"] = fix.position.lon_deg;
  j["heading_deg"] = fix.heading_deg;
  j["heading_source"] = to_string(fix.heading_source);
  j["hfov_deg"] = fix.hfov_deg;
  j["pitch_deg"] = fix.pitch_deg;
  j["camera_height_m"] = fix.camera_height_m ? nlohmann::ordered_json(*fix.camera_height_m) : nlohmann::ordered_json();
  j["width"] = fix.image_w_px;
  j["height"] = fix.image_h_px;
  j["captured_at"] = fix.captured_at ? nlohmann::ordered_json(format_utc(*fix.captured_at)) : nlohmann::ordered_json();
  return j;
}

}  // namespace litter
