#include "litter/evaluate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "litter/error.hpp"
#include "litter/kernels.hpp"

namespace litter {

double iou(const BBox& a, const BBox& b) noexcept {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

MatchResult match_detections(std::span<const Detection> predictions, std::span<const Detection> truths,
                             double iou_threshold) {
  std::vector<const Detection*> preds;
  preds.reserve(predictions.size());
  for (const auto& p : predictions) preds.push_back(&p);
  std::sort(preds.begin(), preds.end(), [](const Detection* a, const Detection* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->annotation_id < b->annotation_id;
  });

  std::vector<const Detection*> gts;
  gts.reserve(truths.size());
  for (const auto& t : truths) gts.push_back(&t);
  std::sort(gts.begin(), gts.end(),
            [](const Detection* a, const Detection* b) { return a->annotation_id < b->annotation_id; });

  MatchResult out;
  std::vector<bool> claimed(gts.size(), false);
  for (const Detection* p : preds) {
    std::size_t best = gts.size();
    double best_iou = -1.0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      if (claimed[i]) continue;
      const double v = iou(p->bbox, gts[i]->bbox);
      // strict > keeps the lowest truth id among equal overlaps
      if (v >= iou_threshold && v > best_iou) {
        best = i;
        best_iou = v;
      }
    }
    if (best < gts.size()) {
      claimed[best] = true;
      out.pairs.push_back({p->annotation_id, gts[best]->annotation_id, best_iou});
    } else {
      out.unmatched_predictions.push_back(p->annotation_id);
    }
  }
  for (std::size_t i = 0; i < gts.size(); ++i)
    if (!claimed[i]) out.unmatched_truths.push_back(gts[i]->annotation_id);
  std::sort(out.unmatched_predictions.begin(), out.unmatched_predictions.end());
  return out;
}

ConfusionCounts confusion(const MatchResult& match) noexcept {
  return {match.pairs.size(), match.unmatched_predictions.size(), match.unmatched_truths.size()};
}

std::optional<double> precision(const ConfusionCounts& c) noexcept {
  if (c.tp + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::optional<double> recall(const ConfusionCounts& c) noexcept {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

EvaluationReport evaluate_report(const CocoDocument& predictions, const CocoDocument& truths, const PipelineConfig& cfg,
                                 std::string dataset) {
  std::set<Id> truth_images;
  for (const auto& img : truths.images) truth_images.insert(img.id);
  for (const auto& img : predictions.images)
    if (!truth_images.count(img.id)) throw Error(Errc::image_set_mismatch, "image " + img.id.str() + " absent from truth");

  const std::vector<Detection> kept = filter_by_confidence(predictions.detections, cfg.confidence_threshold);

  std::map<Id, ImageGroup> groups;
  for (const auto& id : truth_images) groups[id].image_id = id;
  for (const auto& d : kept) {
    auto it = groups.find(d.image_id);
    if (it == groups.end()) throw Error(Errc::image_set_mismatch, "image " + d.image_id.str() + " absent from truth");
    it->second.predictions.push_back(d);
  }
  for (const auto& d : truths.detections) groups[d.image_id].truths.push_back(d);

  std::vector<ImageGroup> batch;
  batch.reserve(groups.size());
  for (auto& [_, g] : groups) batch.push_back(std::move(g));
  const std::vector<MatchResult> matches = parallel::match_batch(batch, cfg.iou_threshold);

  EvaluationReport report;
  report.dataset = std::move(dataset);
  report.threshold = cfg.confidence_threshold;
  report.iou_threshold = cfg.iou_threshold;

  // Per-class rows key on the truth taxonomy's consolidated classes.
  const CategoryMapping mapping = consolidate(truths.taxonomy);
  std::map<Id, std::string> pred_class;
  for (const auto& d : kept) {
    const Category* c = predictions.taxonomy.find(d.category_id);
    pred_class[d.annotation_id] = c ? mapping.target_of_supercategory(c->supercategory) : std::string(kOtherLitter);
  }
  std::map<Id, std::string> truth_class;
  for (const auto& d : truths.detections) truth_class[d.annotation_id] = mapping.target_of(d.category_id);

  std::map<std::string, ConfusionCounts> by_class;
  for (const auto& name : mapping.target_classes) by_class[name];
  for (const auto& m : matches) {
    report.totals += confusion(m);
    for (const auto& p : m.pairs) ++by_class[truth_class.at(p.truth)].tp;
    for (const auto& id : m.unmatched_predictions) ++by_class[pred_class.at(id)].fp;
    for (const auto& id : m.unmatched_truths) ++by_class[truth_class.at(id)].fn;
  }
  report.precision = precision(report.totals);
  report.recall = recall(report.totals);
  for (const auto& name : mapping.target_classes) report.per_class.push_back({name, by_class[name]});
  return report;
}

nlohmann::ordered_json to_json(const EvaluationReport& report) {
  auto metric = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["dataset"] = report.dataset;
  j["threshold"] = report.threshold;
  j["iou_threshold"] = report.iou_threshold;
  j["tp"] = report.totals.tp;
  j["fp"] = report.totals.fp;
  j["fn"] = report.totals.fn;
  j["precision"] = metric(report.precision);
  j["recall"] = metric(report.recall);
  auto& rows = j["per_class"] = nlohmann::ordered_json::array();
  for (const auto& row : report.per_class) {
    rows.push_back({{"class", row.target_class},
                    {"tp", row.counts.tp},
                    {"fp", row.counts.fp},
                    {"fn", row.counts.fn},
                    {"precision", metric(precision(row.counts))},
                    {"recall", metric(recall(row.counts))}});
  }
  return j;
}

}  // namespace litter
