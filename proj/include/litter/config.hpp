#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "litter/geo.hpp"

namespace litter {

// Tunables shared by every pipeline stage. The JSON form mirrors the fields
// one-for-one; `camera_height_m: null` disables ground-plane ranging.
struct PipelineConfig {
  double confidence_threshold = 0.30;
  double iou_threshold = 0.5;
  double hfov_deg = 62.0;
  // 20 ft, the middle of the 10-30 ft range litter was typically seen at.
  double default_distance_m = 6.1;
  std::optional<double> camera_height_m = 1.4;
  double pitch_deg = 0.0;
  double earth_radius_m = kMeanEarthRadiusM;
  double grid_cell_m = 50.0;
  double heading_deg = 0.0;
  bool require_heading = false;

  // Throws Error(invalid_config) naming the first offending field.
  void validate() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& cfg);

// Fields absent from `doc` keep the value from `base`. Unknown keys are
// rejected so typos do not silently fall back to defaults.
PipelineConfig config_from_json(const nlohmann::json& doc, const PipelineConfig& base = {});

}  // namespace litter
