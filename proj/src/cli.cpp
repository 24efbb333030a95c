#include "litter/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "litter/annotations.hpp"
#include "litter/config.hpp"
#include "litter/error.hpp"
#include "litter/evaluate.hpp"
#include "litter/exif.hpp"
#include "litter/map_export.hpp"
#include "litter/pipeline.hpp"
#include "litter/survey_store.hpp"
#include "litter/synth.hpp"

namespace litter {

namespace {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

nlohmann::json parse_json_file(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::malformed_json, path.string() + ": " + e.what());
  }
}

UtcTime now_utc() {
  if (const char* injected = std::getenv(kNowEnv); injected && *injected) {
    if (auto t = parse_utc(injected)) return *t;
    throw Error(Errc::invalid_config, std::string(kNowEnv) + " is not an ISO-8601 UTC time");
  }
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

// Config file first, then explicit flags.
struct ConfigFlags {
  std::string file;
  std::optional<double> threshold;
  std::optional<double> iou;
  std::optional<double> hfov;
  std::optional<double> distance;
  std::optional<double> height;
  std::optional<double> pitch;
  std::optional<double> grid;
  std::optional<double> heading;
  bool no_ground_plane = false;
  bool require_heading = false;

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!file.empty()) cfg = config_from_json(parse_json_file(file));
    if (threshold) cfg.confidence_threshold = *threshold;
    if (iou) cfg.iou_threshold = *iou;
    if (hfov) cfg.hfov_deg = *hfov;
    if (distance) cfg.default_distance_m = *distance;
    if (height) cfg.camera_height_m = *height;
    if (no_ground_plane) cfg.camera_height_m.reset();
    if (pitch) cfg.pitch_deg = *pitch;
    if (grid) cfg.grid_cell_m = *grid;
    if (heading) cfg.heading_deg = *heading;
    if (require_heading) cfg.require_heading = true;
    cfg.validate();
    return cfg;
  }
};

void add_config_file(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.file, "JSON file mirroring the pipeline configuration")->check(CLI::ExistingFile);
}

void add_geometry_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--hfov", f.hfov, "Default horizontal field of view, degrees");
  cmd->add_option("--distance", f.distance, "Fixed fallback distance, metres");
  cmd->add_option("--height", f.height, "Camera height above ground, metres");
  cmd->add_flag("--no-ground-plane", f.no_ground_plane, "Always place detections at the fixed distance");
  cmd->add_option("--pitch", f.pitch, "Camera pitch below the horizon, degrees");
  cmd->add_option("--heading", f.heading, "Heading assumed when an image carries none, degrees");
  cmd->add_flag("--require-heading", f.require_heading, "Reject images without a heading");
}

int cmd_exif(const std::vector<std::string>& paths, const ConfigFlags& flags, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = flags.resolve();
  bool failed = false;
  for (const auto& p : paths) {
    try {
      const std::string bytes = read_text(p);
      const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data());
      const RawExif exif = parse_jpeg_exif({data, bytes.size()});
      const CameraFix fix = extract_camera_fix(exif, cfg, Id(fs::path(p).filename().string()));
      out << to_json(fix).dump() << '\n';
    } catch (const Error& e) {
      failed = true;
      err << p << ": " << e.what() << '\n';
    }
  }
  return failed ? kExitPartial : kExitOk;
}

struct LocateFlags {
  std::string images;
  std::string detections;
  std::string sidecar;
  std::string out;
  std::string store;
  bool strict = false;
};

int cmd_locate(const LocateFlags& f, const ConfigFlags& flags, std::ostream& out) {
  LocateInputs in;
  in.config = flags.resolve();
  in.detections = f.detections;
  if (!f.images.empty()) in.images_dir = f.images;
  if (!f.sidecar.empty()) in.sidecar = f.sidecar;
  in.strict = f.strict;

  LocateOutcome result = run_locate(in);
  write_text(f.out, to_geojson(result.points).dump(2) + "\n");
  result.manifest.inputs.emplace_back("out", f.out);

  if (!f.store.empty()) {
    result.manifest.inputs.emplace_back("store", f.store);
    RunMetadata meta;
    meta.run_time = now_utc();
    result.manifest.run_id = append_run(f.store, result.store_inputs, meta);
    result.manifest.counts.stored = result.store_inputs.size();
  }
  out << to_json(result.manifest).dump(2) << '\n';
  return kExitOk;
}

struct EvaluateFlags {
  std::string pred;
  std::string truth;
  std::string dataset;
};

int cmd_evaluate(const EvaluateFlags& f, const ConfigFlags& flags, std::ostream& out) {
  const PipelineConfig cfg = flags.resolve();
  const CocoDocument preds = load_coco(read_text(f.pred));
  const CocoDocument truth = load_coco(read_text(f.truth));
  const std::string name = f.dataset.empty() ? fs::path(f.truth).stem().string() : f.dataset;
  out << to_json(evaluate_report(preds, truth, cfg, name)).dump(2) << '\n';
  return kExitOk;
}

struct MapFlags {
  std::string geo;
  std::string store;
  std::string from;
  std::string to;
  std::string out;
  std::string title = "Litter detections";
  std::optional<double> grid;
};

UtcTime parse_bound(const std::string& text, bool upper) {
  auto t = parse_utc(text);
  if (!t) throw Error(Errc::invalid_config, "cannot parse time '" + text + "'");
  // A bare date as upper bound covers the whole day.
  if (upper && text.size() == 10) *t += std::chrono::days(1);
  return *t;
}

int cmd_map(const MapFlags& f, const ConfigFlags& flags, std::ostream& out) {
  const PipelineConfig cfg = flags.resolve();
  std::vector<GeoDetection> points;
  if (!f.geo.empty()) {
    points = from_geojson(parse_json_file(f.geo));
  } else {
    SurveyQuery q;
    if (!f.from.empty()) q.from = parse_bound(f.from, false);
    if (!f.to.empty()) q.to = parse_bound(f.to, true);
    const auto all = read_store(f.store);
    for (auto& r : select_records(all, q)) points.push_back(std::move(r.geo));
  }

  std::vector<GridCell> cells;
  if (f.grid) {
    if (!(*f.grid > 0.0)) throw Error(Errc::invalid_config, "--grid must be positive");
    GeoPoint origin{90.0, 180.0};
    for (const auto& p : points) {
      origin.lat_deg = std::min(origin.lat_deg, p.position.lat_deg);
      origin.lon_deg = std::min(origin.lon_deg, p.position.lon_deg);
    }
    cells = grid_bin(points, *f.grid, origin, cfg.earth_radius_m);
  }

  const std::string ext = fs::path(f.out).extension().string();
  const bool html = ext == ".html" || ext == ".htm";
  nlohmann::ordered_json doc;
  if (html) {
    doc = to_geojson(points);
    auto grid = grid_to_geojson(cells);
    for (auto& cell : grid["features"]) doc["features"].push_back(std::move(cell));
    write_text(f.out, render_html(doc, f.title));
  } else {
    doc = f.grid ? grid_to_geojson(cells) : to_geojson(points);
    write_text(f.out, doc.dump(2) + "\n");
  }

  std::size_t binned = 0;
  for (const auto& c : cells) binned += c.total;
  nlohmann::ordered_json summary;
  summary["points"] = points.size();
  summary["cells"] = cells.size();
  summary["binned"] = binned;
  summary["out"] = f.out;
  out << summary.dump(2) << '\n';
  return kExitOk;
}

struct SynthFlags {
  std::uint64_t seed = 1;
  std::size_t points = 20;
  std::size_t cameras = 4;
  std::string out;
};

int cmd_synth(const SynthFlags& f, const ConfigFlags& flags, std::ostream& out) {
  const PipelineConfig cfg = flags.resolve();
  SceneOptions opts;
  opts.n_cameras = f.cameras;
  const SyntheticScene scene = generate_scene(f.seed, f.points, default_scene_area(), cfg, opts);
  const fs::path dir = f.out;
  write_text(dir / "scene.json", to_json(scene).dump(2) + "\n");
  write_text(dir / "sidecar.json", sidecar_to_json(scene.fixes).dump(2) + "\n");
  write_text(dir / "detections.json", to_json(scene.detections).dump(2) + "\n");
  nlohmann::ordered_json summary;
  summary["seed"] = f.seed;
  summary["cameras"] = scene.fixes.size();
  summary["points"] = scene.planted.size();
  summary["out"] = f.out;
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_roundtrip(const std::string& scene_path, const ConfigFlags& flags, std::ostream& out) {
  const SyntheticScene scene = scene_from_json(parse_json_file(scene_path));
  const PipelineConfig cfg = flags.file.empty() ? scene.config : flags.resolve();
  out << to_json(roundtrip_error(scene, cfg)).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geolocate, evaluate and map litter detections from geotagged imagery", "littermap"};
  app.require_subcommand(0, 1);

  ConfigFlags flags;

  std::vector<std::string> exif_paths;
  auto* exif = app.add_subcommand("exif", "Print the camera fix extracted from each JPEG");
  exif->add_option("images", exif_paths, "JPEG files");
  add_config_file(exif, flags);
  exif->add_option("--hfov", flags.hfov, "Field of view when EXIF lacks a 35 mm focal length");

  LocateFlags lf;
  auto* locate = app.add_subcommand("locate", "Place detections on the map");
  locate->add_option("--images", lf.images, "Directory holding the images named in the detections file")
      ->check(CLI::ExistingDirectory);
  locate->add_option("--detections", lf.detections, "COCO-style detections")->required()->check(CLI::ExistingFile);
  locate->add_option("--sidecar", lf.sidecar, "Camera metadata for images without EXIF")->check(CLI::ExistingFile);
  locate->add_option("--out", lf.out, "GeoJSON output path")->required();
  locate->add_option("--store", lf.store, "Survey store to append this run to");
  locate->add_flag("--strict", lf.strict, "Fail on any unreadable image metadata");
  locate->add_option("--threshold", flags.threshold, "Confidence threshold");
  add_config_file(locate, flags);
  add_geometry_flags(locate, flags);

  EvaluateFlags ef;
  auto* evaluate = app.add_subcommand("evaluate", "Precision and recall of predictions against ground truth");
  evaluate->add_option("--pred", ef.pred, "COCO-style predictions")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", ef.truth, "COCO-style ground truth")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--threshold", flags.threshold, "Confidence threshold (default 0.30)");
  evaluate->add_option("--iou", flags.iou, "IoU needed for a match (default 0.5)");
  evaluate->add_option("--dataset", ef.dataset, "Name recorded in the report");
  add_config_file(evaluate, flags);

  MapFlags mf;
  auto* map = app.add_subcommand("map", "Render points or a survey store as GeoJSON or HTML");
  auto* geo_opt = map->add_option("--geo", mf.geo, "Point GeoJSON from `locate`")->check(CLI::ExistingFile);
  auto* store_opt = map->add_option("--store", mf.store, "Survey store")->check(CLI::ExistingFile);
  geo_opt->excludes(store_opt);
  map->add_option("--from", mf.from, "Earliest record time (date or ISO time)")->needs(store_opt);
  map->add_option("--to", mf.to, "Latest record date, inclusive, or exclusive ISO time")->needs(store_opt);
  map->add_option("--grid", mf.grid, "Bin points into square cells of this size, metres");
  map->add_option("--title", mf.title, "HTML page title");
  map->add_option("--out", mf.out, "Output path; .html renders a viewer, anything else GeoJSON")->required();
  add_config_file(map, flags);

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene with known litter positions");
  synth->add_option("--seed", sf.seed, "RNG seed");
  synth->add_option("--points", sf.points, "Planted points");
  synth->add_option("--cameras", sf.cameras, "Cameras");
  synth->add_option("--out", sf.out, "Output directory")->required();
  add_config_file(synth, flags);
  add_geometry_flags(synth, flags);

  std::string scene_path;
  auto* roundtrip = app.add_subcommand("roundtrip", "Placement error of the pipeline on a synthetic scene");
  roundtrip->add_option("--scene", scene_path, "scene.json from `synth`")->required()->check(CLI::ExistingFile);
  add_config_file(roundtrip, flags);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (exif->parsed()) {
      if (exif_paths.empty()) {
        err << exif->help();
        return kExitUsage;
      }
      return cmd_exif(exif_paths, flags, out, err);
    }
    if (locate->parsed()) return cmd_locate(lf, flags, out);
    if (evaluate->parsed()) return cmd_evaluate(ef, flags, out);
    if (map->parsed()) {
      if (mf.geo.empty() == mf.store.empty()) {
        err << "map: exactly one of --geo or --store is required\n\n" << map->help();
        return kExitUsage;
      }
      return cmd_map(mf, flags, out);
    }
    if (synth->parsed()) return cmd_synth(sf, flags, out);
    if (roundtrip->parsed()) return cmd_roundtrip(scene_path, flags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }

  err << app.help();
  return kExitUsage;
}

}  // namespace litter
