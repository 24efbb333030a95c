#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "litter/config.hpp"
#include "litter/geolocate.hpp"
#include "litter/survey_store.hpp"

namespace litter {

struct LocateInputs {
  std::optional<std::filesystem::path> images_dir;
  std::filesystem::path detections;
  std::optional<std::filesystem::path> sidecar;
  PipelineConfig config;
  // EXIF failures abort the run instead of becoming warnings.
  bool strict = false;
};

struct StageCounts {
  std::size_t images_read = 0;
  std::size_t fixes_extracted = 0;
  std::size_t detections_loaded = 0;
  std::size_t kept_after_threshold = 0;
  std::size_t located = 0;
  std::size_t stored = 0;
};

struct RunManifest {
  PipelineConfig config;
  std::vector<std::pair<std::string, std::string>> inputs;
  StageCounts counts;
  std::vector<std::string> warnings;
  std::optional<std::string> run_id;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);

struct LocateOutcome {
  // Sorted by (image_id, annotation_id).
  std::vector<GeoDetection> points;
  // Same order as points, with capture times for the survey store.
  std::vector<StoreInput> store_inputs;
  RunManifest manifest;
};

// Loads detections, resolves one camera fix per image (sidecar first, then
// EXIF from images_dir/file_name), thresholds, consolidates classes and
// places every kept detection. Throws Error on malformed inputs, and on any
// EXIF failure when strict.
LocateOutcome run_locate(const LocateInputs& inputs);

}  // namespace litter
