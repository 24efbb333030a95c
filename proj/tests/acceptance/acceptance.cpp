// Acceptance run: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "exif_builder.hpp"
#include "litter/annotations.hpp"
#include "litter/cli.hpp"
#include "litter/error.hpp"
#include "litter/exif.hpp"
#include "litter/geo.hpp"
#include "litter/kernels.hpp"
#include "litter/map_export.hpp"
#include "litter/synth.hpp"
#include "oracles.hpp"
#include "taco_fixture.hpp"
#include "test_env.hpp"

using namespace litter;
namespace lt = litter::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "littermap");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str()};
}

Outcome metric_table(const std::string& name, std::size_t tp, std::size_t fp, std::size_t fn, double want_p,
                     double want_r, int paper_p_pct, int paper_r_pct, bool exact_rounding) {
  Outcome o;
  const auto t0 = Clock::now();
  const CliRun r = cli({"evaluate", "--pred", lt::fixture("evaluate/" + name + "_pred.json"), "--truth",
                        lt::fixture("evaluate/" + name + "_truth.json"), "--threshold", "0.30"});
  const double secs = seconds_since(t0);
  o.require(r.code == kExitOk, "evaluate exit " + std::to_string(r.code));
  if (!o.pass) return o;
  const auto j = nlohmann::json::parse(r.out);
  const double p = j["precision"].get<double>(), rc = j["recall"].get<double>();
  o.require(j["tp"] == tp && j["fp"] == fp && j["fn"] == fn,
            "counts " + j["tp"].dump() + "/" + j["fp"].dump() + "/" + j["fn"].dump());
  o.require(std::abs(p - want_p) <= 1e-5, "precision " + fmt("%.6f", p));
  o.require(std::abs(rc - want_r) <= 1e-5, "recall " + fmt("%.6f", rc));
  o.require(std::abs(100 * p - paper_p_pct) <= 1.0, "precision vs printed " + std::to_string(paper_p_pct) + "%");
  o.require(std::abs(100 * rc - paper_r_pct) <= 1.0, "recall vs printed " + std::to_string(paper_r_pct) + "%");
  if (exact_rounding)
    o.require(std::lround(100 * p) == paper_p_pct && std::lround(100 * rc) == paper_r_pct, "integer rounding");
  o.require(secs < 1.0, "runtime " + fmt("%.3f s", secs));
  if (o.pass)
    o.detail = "tp/fp/fn " + std::to_string(tp) + "/" + std::to_string(fp) + "/" + std::to_string(fn) +
               ", precision " + fmt("%.5f", p) + ", recall " + fmt("%.5f", rc) + ", " + fmt("%.3f s", secs);
  return o;
}

Outcome ac1() { return metric_table("smartphone", 145, 35, 52, 0.80556, 0.73604, 80, 73, false); }
Outcome ac2() { return metric_table("mapillary", 1, 98, 30, 0.01010, 0.03226, 1, 3, true); }

Outcome ac3() {
  Outcome o;
  const PipelineConfig cfg;
  const auto t0 = Clock::now();
  std::vector<SyntheticScene> scenes;
  scenes.reserve(1000);
  SceneOptions opts;
  opts.max_range_m = 30.0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed)
    scenes.push_back(generate_scene(seed, 20, default_scene_area(), cfg, opts));
  const auto stats = parallel::roundtrip_batch(scenes, cfg);
  const double secs = seconds_since(t0);
  double sum = 0, worst = 0;
  std::size_t n = 0;
  for (const auto& s : stats) {
    sum += s.mean_m * static_cast<double>(s.count);
    n += s.count;
    worst = std::max(worst, s.max_m);
  }
  const double mean = n ? sum / static_cast<double>(n) : 0.0;
  o.require(n == 20000, "points " + std::to_string(n));
  o.require(mean <= 0.5, "mean " + fmt("%.3g m", mean));
  o.require(worst <= 2.0, "max " + fmt("%.3g m", worst));
  o.require(secs < 5.0, "runtime " + fmt("%.2f s", secs));
  if (o.pass)
    o.detail = "1000 scenes, " + std::to_string(n) + " points, mean " + fmt("%.2e m", mean) + ", max " +
               fmt("%.2e m", worst) + ", " + fmt("%.2f s", secs);
  return o;
}

Outcome ac4() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lat(-85, 85), lon(-180, 180), brg(0, 360), dist(0, 1000);
  const auto t0 = Clock::now();
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint origin{lat(rng), lon(rng)};
    const double b = brg(rng), d = dist(rng);
    const GeoPoint a = geodesic_destination(origin, b, d);
    const GeoPoint q = lt::integrate_great_circle(origin, b, d);
    worst = std::max({worst, std::abs(a.lat_deg - q.lat_deg), std::abs(std::remainder(a.lon_deg - q.lon_deg, 360.0))});
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-6, "max deviation " + fmt("%.3g deg", worst));
  o.require(secs < 5.0, "runtime " + fmt("%.2f s", secs));
  if (o.pass) o.detail = "1000 cases, max deviation " + fmt("%.2e deg", worst) + ", " + fmt("%.2f s", secs);
  return o;
}

Outcome ac5() {
  Outcome o;
  const auto ref = nlohmann::json::parse(lt::slurp(lt::fixture("exif/reference.json")));
  std::size_t jpegs = 0, valid = 0, malformed = 0;
  bool le = false, be = false, north = false, south = false, east = false, west = false;
  for (const auto& [name, want] : ref.items()) {
    const auto bytes = lt::slurp_bytes(lt::fixture("exif/" + name));
    if (name.ends_with(".jpg")) ++jpegs;
    if (want.contains("error")) {
      std::string got = "no error";
      try {
        extract_camera_fix(parse_jpeg_exif(bytes), PipelineConfig{});
      } catch (const Error& e) {
        got = std::string(to_string(e.code()));
      }
      o.require(got == want["error"].get<std::string>(), name + ": " + got);
      ++malformed;
      continue;
    }
    try {
      const RawExif raw = parse_jpeg_exif(bytes);
      (raw.byte_order == ByteOrder::little ? le : be) = true;
      const CameraFix fix = extract_camera_fix(raw, PipelineConfig{});
      const double dlat = std::abs(fix.position.lat_deg - want["lat"].get<double>());
      const double dlon = std::abs(fix.position.lon_deg - want["lon"].get<double>());
      o.require(dlat <= 1e-7 && dlon <= 1e-7, name + " off by " + fmt("%.2e", std::max(dlat, dlon)));
      (fix.position.lat_deg >= 0 ? north : south) = true;
      (fix.position.lon_deg >= 0 ? east : west) = true;
      ++valid;
    } catch (const Error& e) {
      o.require(false, name + ": " + e.what());
    }
  }
  o.require(jpegs >= 6, "only " + std::to_string(jpegs) + " JPEGs");
  o.require(le && be, "byte orders not both covered");
  o.require(north && south && east && west, "hemispheres not all covered");
  o.require(ref.contains("no_gps.jpg") && ref.contains("truncated.jpg"), "missing-GPS/truncated fixtures absent");

  // Fuzz: random buffers, JPEG-prefixed random buffers and mutated fixtures.
  std::mt19937_64 rng(0xF022);
  std::vector<std::vector<std::uint8_t>> seeds;
  for (const auto& [name, want] : ref.items()) seeds.push_back(lt::slurp_bytes(lt::fixture("exif/" + name)));
  seeds.push_back(lt::campus_frame(ByteOrder::big).jpeg());
  std::size_t typed = 0, parsed = 0, other = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint8_t> buf;
    switch (i % 4) {
      case 0:
        buf.resize(rng() % 2048);
        for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
        break;
      case 1: {
        const auto tiff = lt::campus_frame(i % 8 == 1 ? ByteOrder::little : ByteOrder::big).tiff();
        buf = lt::TiffBuilder::wrap_jpeg(tiff);
        const std::size_t start = 12;
        for (std::size_t k = start; k < buf.size(); ++k)
          if (rng() % 16 == 0) buf[k] = static_cast<std::uint8_t>(rng());
        break;
      }
      case 2: {
        buf = seeds[rng() % seeds.size()];
        const int flips = 1 + static_cast<int>(rng() % 16);
        for (int k = 0; k < flips && !buf.empty(); ++k) buf[rng() % buf.size()] = static_cast<std::uint8_t>(rng());
        break;
      }
      default: {
        buf = seeds[rng() % seeds.size()];
        buf.resize(rng() % (buf.size() + 1));
        break;
      }
    }
    // Exact-size heap copy so a sanitizer build catches any overread.
    std::unique_ptr<std::uint8_t[]> exact(new std::uint8_t[buf.size() ? buf.size() : 1]);
    std::copy(buf.begin(), buf.end(), exact.get());
    try {
      const RawExif raw = parse_jpeg_exif({exact.get(), buf.size()});
      extract_camera_fix(raw, PipelineConfig{});
      ++parsed;
    } catch (const Error&) {
      ++typed;
    } catch (...) {
      ++other;
    }
  }
  o.require(other == 0, std::to_string(other) + " fuzz cases escaped as untyped exceptions");
  if (o.pass)
    o.detail = std::to_string(valid) + " geotagged + " + std::to_string(malformed) +
               " malformed fixtures match; fuzz 10000 cases (" + std::to_string(parsed) + " parsed, " +
               std::to_string(typed) + " typed errors, 0 crashes)";
  return o;
}

Outcome ac6() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Detection> dets;
  for (int i = 0; i < 5000; ++i) {
    Detection d;
    d.annotation_id = Id(static_cast<std::int64_t>(i));
    d.score = i % 7 == 0 ? 0.30 : (i % 11 == 0 ? std::nextafter(0.30, 0.0) : u(rng));
    dets.push_back(d);
  }
  const auto once = filter_by_confidence(dets, 0.30);
  o.require(filter_by_confidence(once, 0.30) == once, "filter not idempotent");
  std::size_t at_boundary = 0, below_kept = 0;
  for (const auto& d : once) {
    at_boundary += d.score == 0.30;
    below_kept += d.score < 0.30;
  }
  std::size_t boundary_in = 0;
  for (const auto& d : dets) boundary_in += d.score == 0.30;
  o.require(at_boundary == boundary_in && below_kept == 0, "boundary not inclusive");

  const CocoDocument taco = load_coco(lt::taco_like_document());
  const CategoryMapping m = consolidate(taco.taxonomy, 9);
  std::size_t total = 0, mapped = 0;
  std::map<std::string, std::size_t> mass;
  for (const auto& [super, n] : taco.taxonomy.counts) {
    total += n;
    mass[m.target_of_supercategory(super)] += n;
  }
  for (const auto& [cls, n] : mass) mapped += n;
  o.require(taco.images.size() == 1500 && taco.detections.size() == 4784, "TACO-shaped counts");
  o.require(mapped == total && total == 4784, "mass not conserved");
  o.require(m.target_classes.size() == 10, "classes " + std::to_string(m.target_classes.size()));
  o.require(!m.target_classes.empty() && m.target_classes.back() == kOtherLitter, "Other Litter missing");
  if (o.pass)
    o.detail = "idempotent, " + std::to_string(at_boundary) + " scores at 0.30 kept; 60 categories -> " +
               std::to_string(m.target_classes.size()) + " classes, mass " + std::to_string(mapped) + "/" +
               std::to_string(total);
  return o;
}

Outcome ac7() {
  Outcome o;
  ::setenv(kNowEnv, "2022-06-01T12:00:00Z", 1);
  lt::TempDir dir;
  const std::vector<std::string> args{"locate", "--images", lt::fixture("locate/images"), "--detections",
                                      lt::fixture("locate/detections.json"), "--out", dir / "points.geojson"};
  const CliRun a = cli(args);
  const std::string ga = lt::slurp(dir / "points.geojson");
  const CliRun b = cli(args);
  const std::string gb = lt::slurp(dir / "points.geojson");
  o.require(a.code == kExitOk && b.code == kExitOk, "locate failed");
  o.require(ga == gb, "GeoJSON differs between runs");
  o.require(a.out == b.out, "RunManifest differs between runs");
  if (!o.pass) return o;

  const auto expected = nlohmann::json::parse(lt::slurp(lt::fixture("locate/expected.json")));
  const auto features = nlohmann::json::parse(ga)["features"];
  const auto manifest = nlohmann::json::parse(a.out);
  o.require(features.size() == expected["kept"].get<std::size_t>(),
            "features " + std::to_string(features.size()) + " vs kept " + expected["kept"].dump());
  o.require(manifest["counts"]["kept_after_threshold"] == expected["kept"], "manifest kept count");

  const CliRun g = cli({"map", "--geo", dir / "points.geojson", "--grid", "50", "--out", dir / "grid.geojson"});
  std::size_t total = 0;
  const auto grid = nlohmann::json::parse(lt::slurp(dir / "grid.geojson"));
  for (const auto& f : grid["features"])
    total += f["properties"]["total"].get<std::size_t>();
  o.require(g.code == kExitOk && total == features.size(), "grid total " + std::to_string(total));
  ::unsetenv(kNowEnv);
  if (o.pass)
    o.detail = "two runs byte-identical; " + std::to_string(features.size()) + " features = post-threshold count; grid total " +
               std::to_string(total);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {"AC1", "metrics, smartphone table", ac1},
      {"AC2", "metrics, street-imagery table", ac2},
      {"AC3", "geolocation round trip", ac3},
      {"AC4", "geodesic vs integrated great circle", ac4},
      {"AC5", "EXIF corpus and fuzz", ac5},
      {"AC6", "threshold and consolidation properties", ac6},
      {"AC7", "end-to-end determinism", ac7},
  };

  int failed = 0;
  bool metrics_ok = true;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    if (!o.pass) ++failed;
    if ((std::string(c.id) == "AC1" || std::string(c.id) == "AC2") && !o.pass) metrics_ok = false;
    std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
  }

  // The detector itself is not re-run; its published tables are reproduced
  // at the count level by AC1 and AC2.
  std::printf("[%s] AC8 detector out of scope: %s\n", metrics_ok ? "PASS" : "FAIL",
              metrics_ok ? "no network is trained or run; table metrics reproduced from count fixtures (AC1, AC2)"
                         : "count-level reproduction failed");
  if (!metrics_ok) ++failed;

  std::printf("%d of %zu criteria failed\n", failed, criteria.size() + 1);
  return failed == 0 ? 0 : 1;
}
