#include "litter/kernels.hpp"

namespace litter::serial {

std::vector<GeoDetection> locate_batch(std::span<const CameraFix> fixes, std::span<const Detection> detections,
                                       std::span<const LocateTask> tasks, const CategoryMapping& mapping,
                                       const PipelineConfig& cfg) {
  std::vector<GeoDetection> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(locate_detection(fixes[t.fix_index], detections[t.detection_index], mapping, cfg));
  return out;
}

std::vector<MatchResult> match_batch(std::span<const ImageGroup> groups, double iou_threshold) {
  std::vector<MatchResult> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(match_detections(g.predictions, g.truths, iou_threshold));
  return out;
}

std::vector<ErrorStats> roundtrip_batch(std::span<const SyntheticScene> scenes, const PipelineConfig& cfg) {
  std::vector<ErrorStats> out;
  out.reserve(scenes.size());
  for (const auto& s : scenes) out.push_back(roundtrip_error(s, cfg));
  return out;
}

}  // namespace litter::serial
