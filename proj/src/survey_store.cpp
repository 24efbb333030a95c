#include "litter/survey_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "litter/error.hpp"
#include "litter/map_export.hpp"

namespace litter {

namespace {

namespace fs = std::filesystem;

class FileLock {
 public:
  explicit FileLock(const fs::path& path) : fd_(::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644)) {
    if (fd_ < 0) throw Error(Errc::io, "cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(Errc::io, "cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::ordered_json header_json() { return {{"format", kStoreFormat}, {"version", kStoreVersion}}; }

nlohmann::ordered_json record_json(const SurveyRecord& r) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["recorded_at"] = format_utc(r.recorded_at);
  j["image_id"] = id_to_json(r.geo.image_id);
  j["annotation_id"] = id_to_json(r.geo.annotation_id);
  j["class"] = r.geo.target_class;
  j["score"] = r.geo.score;
  j["lat"] = r.geo.position.lat_deg;
  j["lon"] = r.geo.position.lon_deg;
  j["bearing_deg"] = r.geo.bearing_deg;
  j["distance_m"] = r.geo.distance_m;
  j["method"] = to_string(r.geo.method);
  j["time_source"] = to_string(r.time_source);
  return j;
}

SurveyRecord parse_record(const std::string& line, std::size_t line_no) {
  auto corrupt = [line_no](const std::string& why) {
    return Error(Errc::store_corrupt, "line " + std::to_string(line_no) + ": " + why);
  };
  try {
    const auto j = nlohmann::json::parse(line);
    SurveyRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    const auto when = parse_utc(j.at("recorded_at").get<std::string>());
    if (!when) throw corrupt("bad recorded_at");
    r.recorded_at = *when;
    const std::string source = j.at("time_source").get<std::string>();
    if (source == "capture")
      r.time_source = TimeSource::capture;
    else if (source == "run")
      r.time_source = TimeSource::run;
    else
      throw corrupt("bad time_source");
    r.geo.image_id = id_from_json(j.at("image_id"), "image_id");
    r.geo.annotation_id = id_from_json(j.at("annotation_id"), "annotation_id");
    r.geo.target_class = j.at("class").get<std::string>();
    r.geo.score = j.at("score").get<double>();
    r.geo.position = {j.at("lat").get<double>(), j.at("lon").get<double>()};
    r.geo.bearing_deg = j.at("bearing_deg").get<double>();
    r.geo.distance_m = j.at("distance_m").get<double>();
    const std::string method = j.at("method").get<std::string>();
    if (method == "ground-plane")
      r.geo.method = DistanceMethod::ground_plane;
    else if (method == "fixed-distance")
      r.geo.method = DistanceMethod::fixed_distance;
    else
      throw corrupt("bad method");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw corrupt(e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::store_corrupt) throw;
    throw corrupt(e.what());
  }
}

// Parses the whole store text; empty text is an empty store.
std::vector<SurveyRecord> parse_store(const std::string& text) {
  std::vector<SurveyRecord> out;
  if (text.empty()) return out;
  if (text.back() != '\n') throw Error(Errc::store_corrupt, "final line is not newline-terminated");

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      try {
        const auto h = nlohmann::json::parse(line);
        if (h.at("format") != kStoreFormat || h.at("version") != kStoreVersion)
          throw Error(Errc::store_corrupt, "unsupported store header");
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::store_corrupt, std::string("header: ") + e.what());
      }
      continue;
    }
    out.push_back(parse_record(line, line_no));
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string_view to_string(TimeSource s) noexcept { return s == TimeSource::capture ? "capture" : "run"; }

std::string derive_run_id(std::span<const StoreInput> records, UtcTime run_time) {
  std::uint64_t h = fnv1a(format_utc(run_time));
  for (const auto& r : records) {
    SurveyRecord tmp{"", r.captured_at.value_or(run_time), TimeSource::run, r.geo};
    h = fnv1a(record_json(tmp).dump(), h);
  }
  std::string stamp = format_utc(run_time);
  stamp.erase(std::remove_if(stamp.begin(), stamp.end(), [](char c) { return c == '-' || c == ':'; }), stamp.end());
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return "run-" + stamp + "-" + std::string(hex, 8);
}

std::string append_run(const fs::path& store, std::span<const StoreInput> records, const RunMetadata& meta) {
  const std::string run_id = meta.run_id ? *meta.run_id : derive_run_id(records, meta.run_time);
  if (run_id.empty()) throw std::invalid_argument("append_run: empty run id");

  fs::path lock_path = store;
  lock_path += ".lock";
  const FileLock lock(lock_path);

  std::string existing;
  if (fs::exists(store)) existing = read_all(store);
  const auto parsed = parse_store(existing);
  for (const auto& r : parsed)
    if (r.run_id == run_id) throw Error(Errc::duplicate_run, run_id);

  std::string text = existing;
  if (text.empty()) text = header_json().dump() + "\n";
  for (const auto& in : records) {
    SurveyRecord r{run_id, in.captured_at.value_or(meta.run_time),
                   in.captured_at ? TimeSource::capture : TimeSource::run, in.geo};
    text += record_json(r).dump();
    text += '\n';
  }

  fs::path tmp = store;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(Errc::io, "cannot create " + tmp.string());
    std::size_t written = 0;
    while (written < text.size()) {
      const ssize_t n = ::write(fd, text.data() + written, text.size() - written);
      if (n <= 0) {
        ::close(fd);
        fs::remove(tmp);
        throw Error(Errc::io, "write failed for " + tmp.string());
      }
      written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
  }
  fs::rename(tmp, store);
  return run_id;
}

std::vector<SurveyRecord> read_store(const fs::path& store) {
  if (!fs::exists(store)) return {};
  return parse_store(read_all(store));
}

std::vector<SurveyRecord> select_records(std::span<const SurveyRecord> records, const SurveyQuery& q) {
  std::vector<SurveyRecord> out;
  for (const auto& r : records) {
    if (q.area && !q.area->contains(r.geo.position)) continue;
    if (q.from && r.recorded_at < *q.from) continue;
    if (q.to && r.recorded_at >= *q.to) continue;
    out.push_back(r);
  }
  return out;
}

QueryResult query(std::span<const SurveyRecord> records, const SurveyQuery& q) {
  const auto selected = select_records(records, q);
  QueryResult result;
  result.total = selected.size();
  if (selected.empty()) return result;

  GeoPoint origin;
  if (q.origin) {
    origin = *q.origin;
  } else if (q.area) {
    origin = {q.area->min_lat, q.area->min_lon};
  } else {
    origin = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    for (const auto& r : selected) {
      origin.lat_deg = std::min(origin.lat_deg, r.geo.position.lat_deg);
      origin.lon_deg = std::min(origin.lon_deg, r.geo.position.lon_deg);
    }
  }

  for (const auto& r : selected) {
    std::string key;
    switch (q.group_by) {
      case GroupBy::cell: {
        const CellIndex c = cell_of(r.geo.position, q.cell_m, origin, q.earth_radius_m);
        key = std::to_string(c.row) + "," + std::to_string(c.col);
        break;
      }
      case GroupBy::target_class:
        key = r.geo.target_class;
        break;
      case GroupBy::run:
        key = r.run_id;
        break;
    }
    ++result.groups[key];
  }
  return result;
}

QueryResult query(const fs::path& store, const SurveyQuery& q) {
  const auto records = read_store(store);
  return query(records, q);
}

}  // namespace litter
