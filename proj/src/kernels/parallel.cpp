#include <exception>

#include "litter/kernels.hpp"

#if defined(LITTER_HAVE_OPENMP)
#include <omp.h>
#endif

namespace litter::parallel {

namespace {

// Runs body(i) for i in [0, n) across threads. Exceptions are parked per
// index and the first one rethrown after the region.
template <typename Body>
void for_each_index(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

int max_threads() noexcept {
#if defined(LITTER_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<GeoDetection> locate_batch(std::span<const CameraFix> fixes, std::span<const Detection> detections,
                                       std::span<const LocateTask> tasks, const CategoryMapping& mapping,
                                       const PipelineConfig& cfg) {
  std::vector<GeoDetection> out(tasks.size());
  for_each_index(tasks.size(), [&](std::size_t i) {
    out[i] = locate_detection(fixes[tasks[i].fix_index], detections[tasks[i].detection_index], mapping, cfg);
  });
  return out;
}

std::vector<MatchResult> match_batch(std::span<const ImageGroup> groups, double iou_threshold) {
  std::vector<MatchResult> out(groups.size());
  for_each_index(groups.size(),
                 [&](std::size_t i) { out[i] = match_detections(groups[i].predictions, groups[i].truths, iou_threshold); });
  return out;
}

std::vector<ErrorStats> roundtrip_batch(std::span<const SyntheticScene> scenes, const PipelineConfig& cfg) {
  std::vector<ErrorStats> out(scenes.size());
  for_each_index(scenes.size(), [&](std::size_t i) { out[i] = roundtrip_error(scenes[i], cfg); });
  return out;
}

}  // namespace litter::parallel
