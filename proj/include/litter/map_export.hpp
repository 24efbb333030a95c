#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "litter/geo.hpp"
#include "litter/geolocate.hpp"

namespace litter {

// RFC 7946 FeatureCollection with one Point per detection, [lon, lat]
// order, sorted by (image_id, annotation_id).
nlohmann::ordered_json to_geojson(std::span<const GeoDetection> points);

// Inverse of to_geojson for Point features carrying its properties.
// Throws Error(malformed_json).
std::vector<GeoDetection> from_geojson(const nlohmann::json& doc);

struct CellIndex {
  std::int64_t row = 0;
  std::int64_t col = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct GridCell {
  CellIndex index;
  // SW, SE, NE, NW.
  std::array<GeoPoint, 4> bounds;
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
};

// Points within this many metres of a cell edge are treated as lying on it.
inline constexpr double kCellEdgeSnapM = 1e-6;

// Local equirectangular projection about `origin`:
// x = R dlon cos(lat0), y = R dlat (radians).
std::pair<double, double> project_local(const GeoPoint& p, const GeoPoint& origin,
                                        double radius_m = kMeanEarthRadiusM) noexcept;
GeoPoint unproject_local(double x_m, double y_m, const GeoPoint& origin, double radius_m = kMeanEarthRadiusM) noexcept;

// floor(coord / cell); a coordinate on an edge belongs to the higher cell.
std::int64_t cell_coordinate(double coord_m, double cell_m) noexcept;

CellIndex cell_of(const GeoPoint& p, double cell_m, const GeoPoint& origin, double radius_m = kMeanEarthRadiusM) noexcept;

// Occupied cells only, ordered by (row, col).
std::vector<GridCell> grid_bin(std::span<const GeoDetection> points, double cell_m, const GeoPoint& origin,
                               double radius_m = kMeanEarthRadiusM);

// Polygon features with properties {row, col, total, counts}.
nlohmann::ordered_json grid_to_geojson(std::span<const GridCell> cells);

// Self-contained HTML page with the collection embedded inline and a
// dependency-free pan/zoom viewer. Byte-identical for identical input.
std::string render_html(const nlohmann::ordered_json& geojson, std::string_view title);

// Recovers the collection embedded by render_html.
nlohmann::json embedded_geojson(std::string_view html);

}  // namespace litter
