#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "litter/camera.hpp"
#include "litter/config.hpp"
#include "litter/ids.hpp"

namespace litter {

inline constexpr std::string_view kOtherLitter = "Other Litter";

// Pixel rectangle: top-left corner plus extent.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double center_x() const noexcept { return x + w / 2.0; }
  double bottom() const noexcept { return y + h; }
  double area() const noexcept { return w * h; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

// One detector output or ground-truth label. Ground truth carries score 1.
struct Detection {
  Id annotation_id;
  Id image_id;
  std::int64_t category_id = 0;
  double score = 1.0;
  BBox bbox;
  std::optional<std::vector<PixelPoint>> polygon;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct ImageInfo {
  Id id;
  std::string file_name;
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

struct Category {
  std::string name;
  std::string supercategory;

  friend bool operator==(const Category&, const Category&) = default;
};

struct Taxonomy {
  std::map<std::int64_t, Category> categories;
  // Annotation count per supercategory; every supercategory named by a
  // category is present, possibly with zero.
  std::map<std::string, std::size_t> counts;

  const Category* find(std::int64_t category_id) const;
};

struct CocoDocument {
  std::vector<ImageInfo> images;
  std::vector<Detection> detections;
  Taxonomy taxonomy;
};

// Parses a COCO-style document. Boxes are clipped to the declared image
// bounds. Throws Error with malformed_json, missing_field or
// dangling_reference.
CocoDocument load_coco(std::string_view json_text);
CocoDocument load_coco(const nlohmann::json& doc);
inline CocoDocument load_coco(const std::string& json_text) { return load_coco(std::string_view(json_text)); }

// Inverse of load_coco over the retained fields.
nlohmann::ordered_json to_json(const CocoDocument& doc);

// Ten-class style consolidation: the `keep` largest supercategories map to
// themselves, everything else to "Other Litter".
struct CategoryMapping {
  // Kept classes in rank order, then "Other Litter".
  std::vector<std::string> target_classes;
  std::map<std::string, std::string> assignment;
  std::map<std::int64_t, std::string> by_category;

  // Unknown categories and supercategories land in "Other Litter".
  const std::string& target_of(std::int64_t category_id) const;
  const std::string& target_of_supercategory(const std::string& supercategory) const;
};

// Ranks supercategories by annotation count, descending, breaking ties by
// name. k larger than the number of supercategories keeps all of them.
CategoryMapping consolidate(const Taxonomy& taxonomy, std::size_t k = 9);

// Keeps detections with score >= threshold, in their original order.
std::vector<Detection> filter_by_confidence(std::span<const Detection> detections, double threshold);

// Sidecar camera metadata for imagery without usable EXIF: a JSON array of
// {image_id, lat, lon, heading_deg, width, height, captured_at}. Pitch,
// height and field of view come from `cfg`.
std::vector<CameraFix> load_sidecar(std::string_view json_text, const PipelineConfig& cfg);
std::vector<CameraFix> load_sidecar(const nlohmann::json& doc, const PipelineConfig& cfg);
inline std::vector<CameraFix> load_sidecar(const std::string& json_text, const PipelineConfig& cfg) {
  return load_sidecar(std::string_view(json_text), cfg);
}
nlohmann::ordered_json sidecar_to_json(std::span<const CameraFix> fixes);

}  // namespace litter
