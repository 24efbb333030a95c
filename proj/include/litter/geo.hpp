#pragma once

#include <numbers>

namespace litter {

// Mean Earth radius (IUGG R1), metres.
inline constexpr double kMeanEarthRadiusM = 6371008.8;

// Origins closer to a pole than this make the initial bearing meaningless.
inline constexpr double kMaxOriginLatDeg = 89.9;

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Axis-aligned latitude/longitude rectangle, inclusive on all edges.
struct GeoRect {
  double min_lat = -90.0;
  double min_lon = -180.0;
  double max_lat = 90.0;
  double max_lon = 180.0;

  bool contains(const GeoPoint& p) const noexcept {
    return p.lat_deg >= min_lat && p.lat_deg <= max_lat && p.lon_deg >= min_lon && p.lon_deg <= max_lon;
  }
};

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

bool is_valid(const GeoPoint& p) noexcept;

// Into [0, 360).
double normalize_bearing(double deg) noexcept;

// Into [-180, 180].
double normalize_longitude(double deg) noexcept;

// Signed smallest difference a - b, in (-180, 180].
double bearing_difference(double a_deg, double b_deg) noexcept;

// Spherical direct problem: the point reached from `origin` after travelling
// `distance_m` along the great circle leaving at `bearing_deg` (clockwise
// from true north). Throws Error(pole_undefined) for |lat| > 89.9 unless the
// distance is zero, and std::invalid_argument for negative distances.
GeoPoint geodesic_destination(const GeoPoint& origin, double bearing_deg, double distance_m,
                              double radius_m = kMeanEarthRadiusM);

// Great-circle distance by the haversine formula.
double haversine_distance(const GeoPoint& a, const GeoPoint& b, double radius_m = kMeanEarthRadiusM) noexcept;

// Initial great-circle bearing from a to b, in [0, 360).
double initial_bearing(const GeoPoint& a, const GeoPoint& b) noexcept;

}  // namespace litter
