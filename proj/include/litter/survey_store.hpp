#pragma once

// Append-only NDJSON store of geolocated detections across survey runs.
//
// Layout: a header line {"format": "litter-survey", "version": 1} followed by
// one JSON record per line:
//   {run_id, recorded_at, image_id, annotation_id, class, score, lat, lon,
//    bearing_deg, distance_m, method, time_source}
// Every line, the last included, ends with '\n'. Appends rewrite the file
// through a temporary and rename it into place under an exclusive advisory
// lock on "<store>.lock", so readers see either the old or the new file.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "litter/geo.hpp"
#include "litter/geolocate.hpp"
#include "litter/timeutil.hpp"

namespace litter {

inline constexpr std::string_view kStoreFormat = "litter-survey";
inline constexpr int kStoreVersion = 1;

// Whether recorded_at is the image capture time or the run time.
enum class TimeSource { capture, run };

std::string_view to_string(TimeSource s) noexcept;

struct SurveyRecord {
  std::string run_id;
  UtcTime recorded_at{};
  TimeSource time_source = TimeSource::run;
  GeoDetection geo;

  friend bool operator==(const SurveyRecord&, const SurveyRecord&) = default;
};

struct StoreInput {
  GeoDetection geo;
  std::optional<UtcTime> captured_at;
};

struct RunMetadata {
  // Derived from run_time and the records when empty.
  std::optional<std::string> run_id;
  UtcTime run_time{};
};

// Deterministic id: run time plus a content hash of the records.
std::string derive_run_id(std::span<const StoreInput> records, UtcTime run_time);

// Appends one run, creating the store when absent. Throws
// Error(store_corrupt) if any existing line fails to parse (the file is left
// untouched) and Error(duplicate_run) if the run id already occurs.
std::string append_run(const std::filesystem::path& store, std::span<const StoreInput> records, const RunMetadata& meta);

// All records, in file order. A missing store reads as empty.
std::vector<SurveyRecord> read_store(const std::filesystem::path& store);

enum class GroupBy { cell, target_class, run };

struct SurveyQuery {
  std::optional<GeoRect> area;
  // Half-open [from, to).
  std::optional<UtcTime> from;
  std::optional<UtcTime> to;
  GroupBy group_by = GroupBy::target_class;
  double cell_m = 50.0;
  // Grid origin for cell grouping; the south-west corner of `area`, else of
  // the selected records, when unset.
  std::optional<GeoPoint> origin;
  double earth_radius_m = kMeanEarthRadiusM;
};

struct QueryResult {
  std::size_t total = 0;
  // Cell keys are "row,col".
  std::map<std::string, std::size_t> groups;
};

std::vector<SurveyRecord> select_records(std::span<const SurveyRecord> records, const SurveyQuery& q);

QueryResult query(std::span<const SurveyRecord> records, const SurveyQuery& q);
QueryResult query(const std::filesystem::path& store, const SurveyQuery& q);

}  // namespace litter
