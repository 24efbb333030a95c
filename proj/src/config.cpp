#include "litter/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include "litter/error.hpp"

namespace litter {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw Error(Errc::invalid_config, std::string(field) + " " + what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

double number(const nlohmann::json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number()) throw Error(Errc::invalid_config, std::string(key) + " must be a number");
  return v.get<double>();
}

}  // namespace

void PipelineConfig::validate() const {
  require(unit(confidence_threshold), "confidence_threshold", "must lie in [0, 1]");
  require(unit(iou_threshold), "iou_threshold", "must lie in [0, 1]");
  require(std::isfinite(hfov_deg) && hfov_deg > 0.0 && hfov_deg < 180.0, "hfov_deg", "must lie in (0, 180)");
  require(positive(default_distance_m), "default_distance_m", "must be positive");
  require(!camera_height_m || positive(*camera_height_m), "camera_height_m", "must be positive or null");
  require(std::isfinite(pitch_deg) && std::abs(pitch_deg) < 90.0, "pitch_deg", "must lie in (-90, 90)");
  require(positive(earth_radius_m), "earth_radius_m", "must be positive");
  require(positive(grid_cell_m), "grid_cell_m", "must be positive");
  require(std::isfinite(heading_deg), "heading_deg", "must be finite");
}

nlohmann::ordered_json to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["confidence_threshold"] = cfg.confidence_threshold;
  j["iou_threshold"] = cfg.iou_threshold;
  j["hfov_deg"] = cfg.hfov_deg;
  j["default_distance_m"] = cfg.default_distance_m;
  j["camera_height_m"] = cfg.camera_height_m ? nlohmann::ordered_json(*cfg.camera_height_m) : nlohmann::ordered_json();
  j["pitch_deg"] = cfg.pitch_deg;
  j["earth_radius_m"] = cfg.earth_radius_m;
  j["grid_cell_m"] = cfg.grid_cell_m;
  j["heading_deg"] = cfg.heading_deg;
  j["require_heading"] = cfg.require_heading;
  return j;
}

PipelineConfig config_from_json(const nlohmann::json& doc, const PipelineConfig& base) {
  if (!doc.is_object()) throw Error(Errc::invalid_config, "config must be a JSON object");
  static const std::set<std::string> known = {
      "confidence_threshold", "iou_threshold", "hfov_deg",     "default_distance_m", "camera_height_m",
      "pitch_deg",            "earth_radius_m", "grid_cell_m", "heading_deg",        "require_heading"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw Error(Errc::invalid_config, "unknown key '" + key + "'");

  PipelineConfig cfg = base;
  cfg.confidence_threshold = number(doc, "confidence_threshold", cfg.confidence_threshold);
  cfg.iou_threshold = number(doc, "iou_threshold", cfg.iou_threshold);
  cfg.hfov_deg = number(doc, "hfov_deg", cfg.hfov_deg);
  cfg.default_distance_m = number(doc, "default_distance_m", cfg.default_distance_m);
  if (doc.contains("camera_height_m")) {
    const auto& v = doc.at("camera_height_m");
    if (v.is_null())
      cfg.camera_height_m.reset();
    else
      cfg.camera_height_m = number(doc, "camera_height_m", 0.0);
  }
  cfg.pitch_deg = number(doc, "pitch_deg", cfg.pitch_deg);
  cfg.earth_radius_m = number(doc, "earth_radius_m", cfg.earth_radius_m);
  cfg.grid_cell_m = number(doc, "grid_cell_m", cfg.grid_cell_m);
  cfg.heading_deg = number(doc, "heading_deg", cfg.heading_deg);
  if (doc.contains("require_heading")) {
    if (!doc.at("require_heading").is_boolean()) throw Error(Errc::invalid_config, "require_heading must be a boolean");
    cfg.require_heading = doc.at("require_heading").get<bool>();
  }
  cfg.validate();
  return cfg;
}

}  // namespace litter
