#include "litter/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>

#include "litter/annotations.hpp"
#include "litter/error.hpp"
#include "litter/exif.hpp"
#include "litter/kernels.hpp"

namespace litter {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["config"] = to_json(m.config);
  auto& inputs = j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.inputs) inputs[k] = v;
  j["counts"] = {{"images_read", m.counts.images_read},
                 {"fixes_extracted", m.counts.fixes_extracted},
                 {"detections_loaded", m.counts.detections_loaded},
                 {"kept_after_threshold", m.counts.kept_after_threshold},
                 {"located", m.counts.located},
                 {"stored", m.counts.stored}};
  j["warnings"] = m.warnings;
  j["run_id"] = m.run_id ? nlohmann::ordered_json(*m.run_id) : nlohmann::ordered_json();
  return j;
}

LocateOutcome run_locate(const LocateInputs& in) {
  in.config.validate();
  LocateOutcome out;
  RunManifest& manifest = out.manifest;
  manifest.config = in.config;
  manifest.inputs.emplace_back("detections", in.detections.string());
  if (in.images_dir) manifest.inputs.emplace_back("images", in.images_dir->string());
  if (in.sidecar) manifest.inputs.emplace_back("sidecar", in.sidecar->string());

  // A blank detections file is an empty run, not malformed input.
  const std::string det_text = read_text(in.detections);
  const bool blank = det_text.find_first_not_of(" \t\r\n") == std::string::npos;
  const CocoDocument doc = blank ? CocoDocument{} : load_coco(det_text);
  manifest.counts.detections_loaded = doc.detections.size();

  std::map<Id, CameraFix> sidecar;
  if (in.sidecar)
    for (auto& f : load_sidecar(read_text(*in.sidecar), in.config)) sidecar.emplace(f.image_id, std::move(f));

  // One fix per COCO image, in image-id order.
  std::vector<CameraFix> fixes;
  std::map<Id, std::size_t> fix_of;
  std::map<Id, const ImageInfo*> image_of;
  std::size_t magnetic = 0;
  std::size_t assumed = 0;
  std::vector<const ImageInfo*> images;
  for (const auto& img : doc.images) images.push_back(&img);
  std::sort(images.begin(), images.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

  for (const ImageInfo* img : images) {
    image_of[img->id] = img;
    ++manifest.counts.images_read;
    std::optional<CameraFix> fix;
    if (auto it = sidecar.find(img->id); it != sidecar.end()) {
      fix = it->second;
    } else if (in.images_dir) {
      const auto path = *in.images_dir / img->file_name;
      try {
        const auto bytes = read_bytes(path);
        fix = extract_camera_fix(parse_jpeg_exif(bytes), in.config, img->id);
      } catch (const Error& e) {
        if (in.strict) throw;
        manifest.warnings.push_back("image " + img->id.str() + " (" + img->file_name + "): " + e.what());
      }
    } else {
      const std::string msg = "image " + img->id.str() + " (" + img->file_name + "): no sidecar entry and no image directory";
      if (in.strict) throw Error(Errc::no_geotag, msg);
      manifest.warnings.push_back(msg);
    }
    if (!fix) continue;
    if (fix->heading_source == HeadingSource::magnetic) ++magnetic;
    if (fix->heading_source == HeadingSource::assumed) ++assumed;
    fix_of[img->id] = fixes.size();
    fixes.push_back(std::move(*fix));
  }
  manifest.counts.fixes_extracted = fixes.size();
  if (magnetic) manifest.warnings.push_back(std::to_string(magnetic) + " image(s) use magnetic headings; no declination correction applied");
  if (assumed) manifest.warnings.push_back(std::to_string(assumed) + " image(s) lack a heading; assumed " + nlohmann::json(in.config.heading_deg).dump() + " deg");

  std::vector<Detection> kept = filter_by_confidence(doc.detections, in.config.confidence_threshold);
  manifest.counts.kept_after_threshold = kept.size();
  std::sort(kept.begin(), kept.end(), [](const Detection& a, const Detection& b) {
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    return a.annotation_id < b.annotation_id;
  });

  std::vector<LocateTask> tasks;
  std::size_t unplaced = 0;
  std::size_t rescaled = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    auto it = fix_of.find(kept[i].image_id);
    if (it == fix_of.end()) {
      ++unplaced;
      continue;
    }
    // Detector pixel frame may differ from the camera's declared resolution.
    const CameraFix& fix = fixes[it->second];
    const ImageInfo* img = image_of.at(kept[i].image_id);
    if (img->width > 0 && img->height > 0 && (img->width != fix.image_w_px || img->height != fix.image_h_px)) {
      const double sx = static_cast<double>(fix.image_w_px) / img->width;
      const double sy = static_cast<double>(fix.image_h_px) / img->height;
      BBox& b = kept[i].bbox;
      b = {b.x * sx, b.y * sy, b.w * sx, b.h * sy};
      ++rescaled;
    }
    tasks.push_back({it->second, i});
  }
  if (unplaced) manifest.warnings.push_back(std::to_string(unplaced) + " detection(s) dropped: image has no camera fix");
  if (rescaled) manifest.warnings.push_back(std::to_string(rescaled) + " detection(s) rescaled to the camera's pixel dimensions");

  const CategoryMapping mapping = consolidate(doc.taxonomy);
  out.points = parallel::locate_batch(fixes, kept, tasks, mapping, in.config);
  std::stable_sort(out.points.begin(), out.points.end(), source_less);
  manifest.counts.located = out.points.size();

  std::size_t fallback = 0;
  out.store_inputs.reserve(out.points.size());
  for (const auto& p : out.points) {
    if (p.method == DistanceMethod::fixed_distance) ++fallback;
    out.store_inputs.push_back({p, fixes[fix_of.at(p.image_id)].captured_at});
  }
  if (fallback)
    manifest.warnings.push_back(std::to_string(fallback) + " detection(s) placed at the fixed default distance");
  return out;
}

}  // namespace litter
