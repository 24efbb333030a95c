#pragma once

// Data-parallel batch kernels. Every kernel exists twice with the same
// signature: `serial::` is the reference implementation used by tests, and
// `parallel::` distributes the outer loop with OpenMP (falling back to a
// plain loop when built without it). Outputs are index-aligned with inputs,
// so both produce identical results regardless of scheduling. If any item
// throws, the exception of the lowest-index failing item is rethrown.

#include <cstddef>
#include <span>
#include <vector>

#include "litter/annotations.hpp"
#include "litter/evaluate.hpp"
#include "litter/geolocate.hpp"
#include "litter/synth.hpp"

namespace litter {

struct ImageGroup {
  Id image_id;
  std::vector<Detection> predictions;
  std::vector<Detection> truths;
};

// Detection `detection_index` seen by camera `fix_index`.
struct LocateTask {
  std::size_t fix_index = 0;
  std::size_t detection_index = 0;
};

namespace serial {

std::vector<GeoDetection> locate_batch(std::span<const CameraFix> fixes, std::span<const Detection> detections,
                                       std::span<const LocateTask> tasks, const CategoryMapping& mapping,
                                       const PipelineConfig& cfg);

std::vector<MatchResult> match_batch(std::span<const ImageGroup> groups, double iou_threshold);

std::vector<ErrorStats> roundtrip_batch(std::span<const SyntheticScene> scenes, const PipelineConfig& cfg);

}  // namespace serial

namespace parallel {

std::vector<GeoDetection> locate_batch(std::span<const CameraFix> fixes, std::span<const Detection> detections,
                                       std::span<const LocateTask> tasks, const CategoryMapping& mapping,
                                       const PipelineConfig& cfg);

std::vector<MatchResult> match_batch(std::span<const ImageGroup> groups, double iou_threshold);

std::vector<ErrorStats> roundtrip_batch(std::span<const SyntheticScene> scenes, const PipelineConfig& cfg);

// Threads an OpenMP region would use; 1 without OpenMP.
int max_threads() noexcept;

}  // namespace parallel

}  // namespace litter
