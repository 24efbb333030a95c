#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "litter/annotations.hpp"
#include "litter/config.hpp"

namespace litter {

// Intersection over union of two boxes with positive extent.
double iou(const BBox& a, const BBox& b) noexcept;

struct MatchPair {
  Id prediction;
  Id truth;
  double iou = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  // Both sorted by id.
  std::vector<Id> unmatched_predictions;
  std::vector<Id> unmatched_truths;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

// Greedy one-to-one matching within one image. Predictions are visited by
// descending score (ties: ascending id); each claims the unclaimed truth of
// highest IoU >= threshold (ties: ascending truth id). Categories are
// ignored: a located object counts whatever it was labelled.
MatchResult match_detections(std::span<const Detection> predictions, std::span<const Detection> truths,
                             double iou_threshold);

// TN is deliberately absent; it is never quantified.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const MatchResult& match) noexcept;

// tp / (tp + fp); empty when there were no predictions.
std::optional<double> precision(const ConfusionCounts& c) noexcept;
// tp / (tp + fn); empty when there was no ground truth.
std::optional<double> recall(const ConfusionCounts& c) noexcept;

struct ClassCounts {
  std::string target_class;
  ConfusionCounts counts;
};

struct EvaluationReport {
  std::string dataset;
  double threshold = 0.0;
  double iou_threshold = 0.0;
  ConfusionCounts totals;
  std::optional<double> precision;
  std::optional<double> recall;
  std::vector<ClassCounts> per_class;
};

// Thresholds predictions, matches per image and aggregates. Per-class rows
// are informational: TP and FN use the truth's class, FP the prediction's,
// both consolidated through the truth taxonomy. Throws
// Error(image_set_mismatch) when predictions name images the truth lacks.
EvaluationReport evaluate_report(const CocoDocument& predictions, const CocoDocument& truths, const PipelineConfig& cfg,
                                 std::string dataset = "dataset");

nlohmann::ordered_json to_json(const EvaluationReport& report);

}  // namespace litter
