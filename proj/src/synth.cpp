#include "litter/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "litter/error.hpp"
#include "litter/geolocate.hpp"

namespace litter {

namespace {

// Portable uniform draws; std distributions differ across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

 private:
  std::mt19937_64 engine_;
};

const std::vector<std::pair<std::int64_t, std::string>>& synthetic_classes() {
  static const std::vector<std::pair<std::int64_t, std::string>> classes = {
      {1, "Bottle"}, {2, "Can"}, {3, "Cigarette"}, {4, "Carton"}, {5, "Plastic bag & wrapper"}};
  return classes;
}

}  // namespace

GeoRect default_scene_area() noexcept { return {38.555, -121.430, 38.565, -121.418}; }

GeoPoint nvector_destination(const GeoPoint& origin, double bearing_deg, double distance_m, double radius_m) {
  const double lat = deg_to_rad(origin.lat_deg);
  const double lon = deg_to_rad(origin.lon_deg);
  const double theta = deg_to_rad(bearing_deg);
  const double delta = distance_m / radius_m;

  const double p[3] = {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
  const double north[3] = {-std::sin(lat) * std::cos(lon), -std::sin(lat) * std::sin(lon), std::cos(lat)};
  const double east[3] = {-std::sin(lon), std::cos(lon), 0.0};
  double q[3];
  for (int i = 0; i < 3; ++i)
    q[i] = p[i] * std::cos(delta) + (north[i] * std::cos(theta) + east[i] * std::sin(theta)) * std::sin(delta);
  return {rad_to_deg(std::atan2(q[2], std::hypot(q[0], q[1]))), rad_to_deg(std::atan2(q[1], q[0]))};
}

PixelFootprint project_to_pixel(const CameraFix& fix, const GeoPoint& point, const PipelineConfig& cfg) {
  const double d = haversine_distance(fix.position, point, cfg.earth_radius_m);
  if (d < kMinRangeM || d > kMaxRangeM) throw Error(Errc::out_of_range, "distance " + std::to_string(d) + " m");
  if (!fix.camera_height_m) throw Error(Errc::out_of_range, "camera height unknown");

  const double half = deg_to_rad(fix.hfov_deg) / 2.0;
  double offset = deg_to_rad(bearing_difference(initial_bearing(fix.position, point), fix.heading_deg));
  if (std::abs(offset) > half + 1e-12) throw Error(Errc::out_of_cone, "offset " + std::to_string(rad_to_deg(offset)) + " deg");
  offset = std::clamp(offset, -half, half);

  const double w = fix.image_w_px;
  const double h = fix.image_h_px;
  PixelFootprint px;
  px.u = w / 2.0 * (1.0 + std::tan(offset) / std::tan(half));
  const double alpha = std::atan(*fix.camera_height_m / d);
  px.v_bottom = h / 2.0 * (1.0 + std::tan(alpha - deg_to_rad(fix.pitch_deg)) / tan_half_vfov(fix));
  if (!(px.v_bottom >= 0.0 && px.v_bottom <= h)) throw Error(Errc::out_of_range, "base below the frame");
  return px;
}

SyntheticScene generate_scene(std::uint64_t seed, std::size_t n_points, const GeoRect& area, const PipelineConfig& cfg,
                              const SceneOptions& options) {
  if (!cfg.camera_height_m) throw std::invalid_argument("generate_scene needs a camera height");
  if (options.n_cameras == 0 && n_points > 0) throw std::invalid_argument("generate_scene needs cameras");
  if (!(options.min_range_m <= options.max_range_m)) throw std::invalid_argument("generate_scene: empty range");

  Rng rng(seed);
  SyntheticScene scene;
  scene.seed = seed;
  scene.config = cfg;

  for (const auto& [id, name] : synthetic_classes()) {
    scene.detections.taxonomy.categories[id] = {name, name};
    scene.detections.taxonomy.counts[name] = 0;
  }

  // True headings drive projection; recorded ones may carry heading error.
  std::vector<double> true_heading;
  const UtcTime start = *parse_utc("2022-05-11T16:00:00Z");
  for (std::size_t c = 0; c < options.n_cameras; ++c) {
    CameraFix fix;
    fix.image_id = Id(static_cast<std::int64_t>(c + 1));
    fix.position = {rng.uniform(area.min_lat, area.max_lat), rng.uniform(area.min_lon, area.max_lon)};
    fix.heading_deg = normalize_bearing(rng.uniform(0.0, 360.0));
    fix.heading_source = HeadingSource::true_north;
    fix.hfov_deg = cfg.hfov_deg;
    fix.pitch_deg = cfg.pitch_deg;
    fix.camera_height_m = cfg.camera_height_m;
    fix.image_w_px = options.image_w_px;
    fix.image_h_px = options.image_h_px;
    fix.captured_at = start + std::chrono::minutes(c);
    scene.detections.images.push_back(
        {fix.image_id, "synth_" + std::to_string(c + 1) + ".jpg", fix.image_w_px, fix.image_h_px});
    scene.fixes.push_back(fix);
    true_heading.push_back(fix.heading_deg);
  }
  if (options.heading_error_deg > 0.0)
    for (auto& fix : scene.fixes)
      fix.heading_deg = normalize_bearing(fix.heading_deg + rng.uniform(-1.0, 1.0) * options.heading_error_deg);

  const std::size_t max_attempts = 1000 * (n_points + 1);
  std::size_t attempts = 0;
  while (scene.planted.size() < n_points) {
    if (++attempts > max_attempts) throw std::runtime_error("generate_scene: cannot plant visible points with these options");
    const std::size_t cam = rng.index(scene.fixes.size());
    CameraFix truth = scene.fixes[cam];
    truth.heading_deg = true_heading[cam];

    const double offset = rng.uniform(-0.999, 0.999) * cfg.hfov_deg / 2.0;
    const double range = rng.uniform(options.min_range_m, options.max_range_m);
    const auto& cls = synthetic_classes()[rng.index(synthetic_classes().size())];
    const double jitter = rng.uniform(-1.0, 1.0) * options.pixel_jitter_px;
    const GeoPoint p = nvector_destination(truth.position, truth.heading_deg + offset, range, cfg.earth_radius_m);

    PixelFootprint px;
    try {
      px = project_to_pixel(truth, p, cfg);
    } catch (const Error&) {
      continue;
    }
    const double w_img = truth.image_w_px;
    const double u = std::clamp(px.u + jitter, 0.0, w_img);
    if (px.v_bottom <= 1.0 || u <= 0.0 || u >= w_img) continue;

    double box_w = options.object_width_m / range * (w_img / 2.0) / std::tan(deg_to_rad(truth.hfov_deg) / 2.0);
    double box_h = options.object_height_m / range * (truth.image_h_px / 2.0) / tan_half_vfov(truth);
    box_w = std::min({box_w, 2.0 * u, 2.0 * (w_img - u)});
    const double top = std::max(0.0, px.v_bottom - box_h);
    box_h = px.v_bottom - top;

    const Id ann(static_cast<std::int64_t>(scene.planted.size() + 1));
    Detection det;
    det.annotation_id = ann;
    det.image_id = truth.image_id;
    det.category_id = cls.first;
    det.score = options.score;
    det.bbox = {u - box_w / 2.0, top, box_w, box_h};
    scene.detections.detections.push_back(det);
    ++scene.detections.taxonomy.counts[cls.second];
    scene.planted.push_back({truth.image_id, ann, p, cls.second, haversine_distance(truth.position, p, cfg.earth_radius_m)});
  }
  return scene;
}

std::vector<double> roundtrip_errors(const SyntheticScene& scene, const PipelineConfig& cfg) {
  std::unordered_map<Id, std::size_t> fix_of;
  for (std::size_t i = 0; i < scene.fixes.size(); ++i) fix_of[scene.fixes[i].image_id] = i;
  std::unordered_map<Id, std::size_t> det_of;
  for (std::size_t i = 0; i < scene.detections.detections.size(); ++i)
    det_of[scene.detections.detections[i].annotation_id] = i;

  const CategoryMapping mapping = consolidate(scene.detections.taxonomy);
  std::vector<double> errors;
  errors.reserve(scene.planted.size());
  for (const auto& planted : scene.planted) {
    CameraFix fix = scene.fixes.at(fix_of.at(planted.image_id));
    fix.camera_height_m = cfg.camera_height_m;
    const GeoDetection g = locate_detection(fix, scene.detections.detections.at(det_of.at(planted.annotation_id)), mapping, cfg);
    errors.push_back(haversine_distance(g.position, planted.position, cfg.earth_radius_m));
  }
  return errors;
}

ErrorStats summarize_errors(std::span<const double> errors) {
  ErrorStats s;
  s.count = errors.size();
  if (errors.empty()) return s;
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double e : sorted) sum += e;
  s.mean_m = sum / static_cast<double>(sorted.size());
  s.max_m = sorted.back();
  // nearest rank
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size())));
  s.p95_m = sorted[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

ErrorStats roundtrip_error(const SyntheticScene& scene, const PipelineConfig& cfg) {
  const auto errors = roundtrip_errors(scene, cfg);
  return summarize_errors(errors);
}

nlohmann::ordered_json to_json(const SyntheticScene& scene) {
  nlohmann::ordered_json j;
  j["format"] = "litter-synthetic-scene";
  j["version"] = 1;
  j["seed"] = scene.seed;
  j["config"] = to_json(scene.config);
  j["sidecar"] = sidecar_to_json(scene.fixes);
  j["coco"] = to_json(scene.detections);
  auto& planted = j["planted"] = nlohmann::ordered_json::array();
  for (const auto& p : scene.planted)
    planted.push_back({{"image_id", id_to_json(p.image_id)},
                       {"annotation_id", id_to_json(p.annotation_id)},
                       {"lat", p.position.lat_deg},
                       {"lon", p.position.lon_deg},
                       {"class", p.target_class},
                       {"distance_m", p.distance_m}});
  return j;
}

SyntheticScene scene_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "litter-synthetic-scene")
    throw Error(Errc::malformed_json, "not a synthetic scene document");
  for (const char* key : {"seed", "config", "sidecar", "coco", "planted"})
    if (!doc.contains(key)) throw Error(Errc::missing_field, key);

  SyntheticScene scene;
  scene.seed = doc.at("seed").get<std::uint64_t>();
  scene.config = config_from_json(doc.at("config"));
  scene.fixes = load_sidecar(doc.at("sidecar"), scene.config);
  scene.detections = load_coco(doc.at("coco"));
  for (const auto& p : doc.at("planted")) {
    PlantedPoint pp;
    pp.image_id = id_from_json(p.at("image_id"), "image_id");
    pp.annotation_id = id_from_json(p.at("annotation_id"), "annotation_id");
    pp.position = {p.at("lat").get<double>(), p.at("lon").get<double>()};
    pp.target_class = p.at("class").get<std::string>();
    pp.distance_m = p.at("distance_m").get<double>();
    scene.planted.push_back(std::move(pp));
  }
  return scene;
}

nlohmann::ordered_json to_json(const ErrorStats& stats) {
  return {{"count", stats.count}, {"mean_m", stats.mean_m}, {"max_m", stats.max_m}, {"p95_m", stats.p95_m}};
}

}  // namespace litter
