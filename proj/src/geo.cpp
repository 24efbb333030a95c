#include "litter/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "litter/error.hpp"

namespace litter {

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) && p.lat_deg >= -90.0 && p.lat_deg <= 90.0 &&
         p.lon_deg >= -180.0 && p.lon_deg <= 180.0;
}

double normalize_bearing(double deg) noexcept {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // -1e-17 + 360 rounds to 360
  if (r >= 360.0) r = 0.0;
  return r;
}

double normalize_longitude(double deg) noexcept {
  if (deg >= -180.0 && deg <= 180.0) return deg;
  double r = std::fmod(deg + 180.0, 360.0);
  if (r < 0.0) r += 360.0;
  return r - 180.0;
}

double bearing_difference(double a_deg, double b_deg) noexcept {
  double d = std::fmod(a_deg - b_deg, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

GeoPoint geodesic_destination(const GeoPoint& origin, double bearing_deg, double distance_m, double radius_m) {
  if (!(distance_m >= 0.0)) throw std::invalid_argument("geodesic_destination: negative distance");
  if (distance_m == 0.0) return origin;
  if (std::abs(origin.lat_deg) > kMaxOriginLatDeg)
    throw Error(Errc::pole_undefined, "origin latitude " + std::to_string(origin.lat_deg) + " too close to a pole");

  const double delta = distance_m / radius_m;
  const double theta = deg_to_rad(bearing_deg);
  const double lat1 = deg_to_rad(origin.lat_deg);
  const double lon1 = deg_to_rad(origin.lon_deg);

  const double sin_lat2 =
      std::clamp(std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(theta), -1.0, 1.0);
  const double lat2 = std::asin(sin_lat2);
  const double lon2 = lon1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                                        std::cos(delta) - std::sin(lat1) * sin_lat2);
  return {rad_to_deg(lat2), normalize_longitude(rad_to_deg(lon2))};
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b, double radius_m) noexcept {
  const double lat1 = deg_to_rad(a.lat_deg);
  const double lat2 = deg_to_rad(b.lat_deg);
  const double s1 = std::sin((lat2 - lat1) / 2.0);
  const double s2 = std::sin(deg_to_rad(b.lon_deg - a.lon_deg) / 2.0);
  const double h = std::clamp(s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2, 0.0, 1.0);
  return 2.0 * radius_m * std::asin(std::sqrt(h));
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double lat1 = deg_to_rad(a.lat_deg);
  const double lat2 = deg_to_rad(b.lat_deg);
  const double dlon = deg_to_rad(b.lon_deg - a.lon_deg);
  const double y = std::sin(dlon) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  return normalize_bearing(rad_to_deg(std::atan2(y, x)));
}

}  // namespace litter
