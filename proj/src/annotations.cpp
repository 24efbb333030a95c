#include "litter/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "litter/error.hpp"

namespace litter {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(Errc::missing_field, std::string(where) + "." + key);
  return *it;
}

double number(const json& v, const char* what) {
  if (!v.is_number()) throw Error(Errc::malformed_json, std::string(what) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(Errc::malformed_json, std::string(what) + " must be finite");
  return d;
}

std::uint32_t dimension(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return 0;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0 || it->get<std::int64_t>() > UINT32_MAX)
    throw Error(Errc::malformed_json, std::string("image ") + key + " must be a non-negative integer");
  return static_cast<std::uint32_t>(it->get<std::int64_t>());
}

std::optional<std::vector<PixelPoint>> first_polygon(const json& ann) {
  auto it = ann.find("segmentation");
  if (it == ann.end() || !it->is_array()) return std::nullopt;
  for (const auto& poly : *it) {
    if (!poly.is_array() || poly.size() < 6 || poly.size() % 2 != 0) continue;
    std::vector<PixelPoint> pts;
    pts.reserve(poly.size() / 2);
    for (std::size_t i = 0; i < poly.size(); i += 2)
      pts.push_back({number(poly[i], "segmentation x"), number(poly[i + 1], "segmentation y")});
    return pts;
  }
  return std::nullopt;
}

BBox clip(BBox b, const ImageInfo& img) {
  if (img.width == 0 || img.height == 0) return b;
  if (b.x >= 0.0 && b.y >= 0.0 && b.x + b.w <= img.width && b.y + b.h <= img.height) return b;
  const double x0 = std::max(0.0, b.x);
  const double y0 = std::max(0.0, b.y);
  const double x1 = std::min<double>(img.width, b.x + b.w);
  const double y1 = std::min<double>(img.height, b.y + b.h);
  return {x0, y0, x1 - x0, y1 - y0};
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::malformed_json, e.what());
  }
}

}  // namespace

const Category* Taxonomy::find(std::int64_t category_id) const {
  auto it = categories.find(category_id);
  return it == categories.end() ? nullptr : &it->second;
}

CocoDocument load_coco(std::string_view json_text) { return load_coco(parse_text(json_text)); }

CocoDocument load_coco(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::malformed_json, "COCO document must be an object");
  for (const char* key : {"images", "annotations", "categories"}) {
    if (!doc.contains(key)) throw Error(Errc::missing_field, key);
    if (!doc.at(key).is_array()) throw Error(Errc::malformed_json, std::string(key) + " must be an array");
  }

  CocoDocument out;
  std::unordered_map<Id, std::size_t> image_index;
  for (const auto& img : doc.at("images")) {
    if (!img.is_object()) throw Error(Errc::malformed_json, "image record must be an object");
    ImageInfo info;
    info.id = id_from_json(field(img, "id", "images[]"), "image id");
    if (auto it = img.find("file_name"); it != img.end()) {
      if (!it->is_string()) throw Error(Errc::malformed_json, "file_name must be a string");
      info.file_name = it->get<std::string>();
    }
    info.width = dimension(img, "width");
    info.height = dimension(img, "height");
    if (!image_index.emplace(info.id, out.images.size()).second)
      throw Error(Errc::malformed_json, "duplicate image id " + info.id.str());
    out.images.push_back(std::move(info));
  }

  for (const auto& cat : doc.at("categories")) {
    if (!cat.is_object()) throw Error(Errc::malformed_json, "category record must be an object");
    const auto& id = field(cat, "id", "categories[]");
    if (!id.is_number_integer()) throw Error(Errc::malformed_json, "category id must be an integer");
    const auto& name = field(cat, "name", "categories[]");
    if (!name.is_string()) throw Error(Errc::malformed_json, "category name must be a string");
    Category c{name.get<std::string>(), {}};
    auto super = cat.find("supercategory");
    c.supercategory = (super != cat.end() && super->is_string()) ? super->get<std::string>() : c.name;
    out.taxonomy.counts.try_emplace(c.supercategory, 0);
    if (!out.taxonomy.categories.emplace(id.get<std::int64_t>(), std::move(c)).second)
      throw Error(Errc::malformed_json, "duplicate category id " + std::to_string(id.get<std::int64_t>()));
  }

  std::unordered_set<Id> seen_annotations;
  for (const auto& ann : doc.at("annotations")) {
    if (!ann.is_object()) throw Error(Errc::malformed_json, "annotation record must be an object");
    Detection d;
    d.annotation_id = id_from_json(field(ann, "id", "annotations[]"), "annotation id");
    if (!seen_annotations.insert(d.annotation_id).second)
      throw Error(Errc::malformed_json, "duplicate annotation id " + d.annotation_id.str());
    d.image_id = id_from_json(field(ann, "image_id", "annotations[]"), "image_id");
    const auto& cat = field(ann, "category_id", "annotations[]");
    if (!cat.is_number_integer()) throw Error(Errc::malformed_json, "category_id must be an integer");
    d.category_id = cat.get<std::int64_t>();

    const auto& box = field(ann, "bbox", "annotations[]");
    if (!box.is_array() || box.size() != 4) throw Error(Errc::malformed_json, "bbox must be [x, y, w, h]");
    d.bbox = {number(box[0], "bbox x"), number(box[1], "bbox y"), number(box[2], "bbox w"), number(box[3], "bbox h")};
    if (auto it = ann.find("score"); it != ann.end() && !it->is_null()) {
      d.score = number(*it, "score");
      if (d.score < 0.0 || d.score > 1.0) throw Error(Errc::malformed_json, "score outside [0, 1]");
    }
    d.polygon = first_polygon(ann);

    auto img = image_index.find(d.image_id);
    if (img == image_index.end())
      throw Error(Errc::dangling_reference, "annotation " + d.annotation_id.str() + " references image " + d.image_id.str());
    const Category* category = out.taxonomy.find(d.category_id);
    if (!category) throw Error(Errc::dangling_reference, std::to_string(d.category_id));

    if (!(d.bbox.w > 0.0) || !(d.bbox.h > 0.0))
      throw Error(Errc::malformed_json, "annotation " + d.annotation_id.str() + " has a non-positive bbox extent");
    d.bbox = clip(d.bbox, out.images[img->second]);
    if (!(d.bbox.w > 0.0) || !(d.bbox.h > 0.0))
      throw Error(Errc::malformed_json, "annotation " + d.annotation_id.str() + " lies outside its image");

    ++out.taxonomy.counts[category->supercategory];
    out.detections.push_back(std::move(d));
  }
  return out;
}

nlohmann::ordered_json to_json(const CocoDocument& doc) {
  nlohmann::ordered_json j;
  auto& images = j["images"] = nlohmann::ordered_json::array();
  for (const auto& img : doc.images)
    images.push_back({{"id", id_to_json(img.id)}, {"file_name", img.file_name}, {"width", img.width}, {"height", img.height}});

  auto& anns = j["annotations"] = nlohmann::ordered_json::array();
  for (const auto& d : doc.detections) {
    nlohmann::ordered_json a;
    a["id"] = id_to_json(d.annotation_id);
    a["image_id"] = id_to_json(d.image_id);
    a["category_id"] = d.category_id;
    a["bbox"] = {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h};
    a["score"] = d.score;
    if (d.polygon) {
      nlohmann::ordered_json flat = nlohmann::ordered_json::array();
      for (const auto& p : *d.polygon) {
        flat.push_back(p.x);
        flat.push_back(p.y);
      }
      a["segmentation"] = nlohmann::ordered_json::array({flat});
    }
    anns.push_back(std::move(a));
  }

  auto& cats = j["categories"] = nlohmann::ordered_json::array();
  for (const auto& [id, c] : doc.taxonomy.categories)
    cats.push_back({{"id", id}, {"name", c.name}, {"supercategory", c.supercategory}});
  return j;
}

const std::string& CategoryMapping::target_of(std::int64_t category_id) const {
  static const std::string other(kOtherLitter);
  auto it = by_category.find(category_id);
  return it == by_category.end() ? other : it->second;
}

const std::string& CategoryMapping::target_of_supercategory(const std::string& supercategory) const {
  static const std::string other(kOtherLitter);
  auto it = assignment.find(supercategory);
  return it == assignment.end() ? other : it->second;
}

CategoryMapping consolidate(const Taxonomy& taxonomy, std::size_t k) {
  std::vector<std::pair<std::string, std::size_t>> ranked(taxonomy.counts.begin(), taxonomy.counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  CategoryMapping m;
  const std::size_t kept = std::min(k, ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& name = ranked[i].first;
    if (i < kept) {
      m.assignment[name] = name;
      m.target_classes.push_back(name);
    } else {
      m.assignment[name] = std::string(kOtherLitter);
    }
  }
  if (std::find(m.target_classes.begin(), m.target_classes.end(), kOtherLitter) == m.target_classes.end())
    m.target_classes.emplace_back(kOtherLitter);

  for (const auto& [id, c] : taxonomy.categories) m.by_category[id] = m.assignment.at(c.supercategory);
  return m;
}

std::vector<Detection> filter_by_confidence(std::span<const Detection> detections, double threshold) {
  std::vector<Detection> kept;
  kept.reserve(detections.size());
  std::copy_if(detections.begin(), detections.end(), std::back_inserter(kept),
               [threshold](const Detection& d) { return d.score >= threshold; });
  return kept;
}

std::vector<CameraFix> load_sidecar(std::string_view json_text, const PipelineConfig& cfg) {
  return load_sidecar(parse_text(json_text), cfg);
}

std::vector<CameraFix> load_sidecar(const json& doc, const PipelineConfig& cfg) {
  if (!doc.is_array()) throw Error(Errc::malformed_json, "sidecar must be a JSON array");
  std::vector<CameraFix> fixes;
  std::unordered_set<Id> seen;
  for (const auto& rec : doc) {
    if (!rec.is_object()) throw Error(Errc::malformed_json, "sidecar record must be an object");
    CameraFix fix;
    fix.image_id = id_from_json(field(rec, "image_id", "sidecar[]"), "image_id");
    if (!seen.insert(fix.image_id).second) throw Error(Errc::malformed_json, "duplicate sidecar image " + fix.image_id.str());
    fix.position = {number(field(rec, "lat", "sidecar[]"), "lat"), number(field(rec, "lon", "sidecar[]"), "lon")};
    if (!is_valid(fix.position)) throw Error(Errc::malformed_json, "sidecar position out of range for " + fix.image_id.str());

    auto heading = rec.find("heading_deg");
    if (heading != rec.end() && !heading->is_null()) {
      fix.heading_deg = normalize_bearing(number(*heading, "heading_deg"));
      fix.heading_source = HeadingSource::true_north;
    } else if (cfg.require_heading) {
      throw Error(Errc::no_heading, "sidecar image " + fix.image_id.str());
    } else {
      fix.heading_deg = normalize_bearing(cfg.heading_deg);
      fix.heading_source = HeadingSource::assumed;
    }

    fix.image_w_px = dimension(rec, "width");
    fix.image_h_px = dimension(rec, "height");
    if (fix.image_w_px == 0 || fix.image_h_px == 0)
      throw Error(Errc::missing_field, "sidecar width/height for image " + fix.image_id.str());

    if (auto when = rec.find("captured_at"); when != rec.end() && !when->is_null()) {
      if (!when->is_string()) throw Error(Errc::malformed_json, "captured_at must be a string");
      fix.captured_at = parse_utc(when->get<std::string>());
      if (!fix.captured_at) throw Error(Errc::malformed_json, "unparseable captured_at '" + when->get<std::string>() + "'");
    }
    fix.hfov_deg = cfg.hfov_deg;
    fix.pitch_deg = cfg.pitch_deg;
    fix.camera_height_m = cfg.camera_height_m;
    fixes.push_back(std::move(fix));
  }
  return fixes;
}

nlohmann::ordered_json sidecar_to_json(std::span<const CameraFix> fixes) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& f : fixes) {
    nlohmann::ordered_json r;
    r["image_id"] = id_to_json(f.image_id);
    r["lat"] = f.position.lat_deg;
    r["lon"] = f.position.lon_deg;
    r["heading_deg"] = f.heading_source == HeadingSource::assumed ? nlohmann::ordered_json(nullptr)
                                                                  : nlohmann::ordered_json(f.heading_deg);
    r["width"] = f.image_w_px;
    r["height"] = f.image_h_px;
    r["captured_at"] = f.captured_at ? nlohmann::ordered_json(format_utc(*f.captured_at)) : nlohmann::ordered_json();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace litter
