#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "litter/camera.hpp"
#include "litter/config.hpp"

namespace litter {

enum class ByteOrder { little, big };

// Which directory a tag was read from. Thumbnail (IFD1) and any other
// chained directories are never visited.
enum class Ifd : std::uint8_t { primary, exif, gps };

struct URational {
  std::uint32_t num = 0;
  std::uint32_t den = 0;

  friend bool operator==(const URational&, const URational&) = default;
};

// BYTE, SHORT and LONG all decode into the integer list.
using ExifValue = std::variant<std::vector<URational>, std::string, std::vector<std::uint32_t>>;

struct ExifEntry {
  std::uint16_t type = 0;
  std::uint32_t count = 0;
  // ASCII values keep all `count` bytes, terminator included.
  ExifValue value;

  friend bool operator==(const ExifEntry&, const ExifEntry&) = default;
};

struct ExifKey {
  Ifd ifd = Ifd::primary;
  std::uint16_t tag = 0;

  friend auto operator<=>(const ExifKey&, const ExifKey&) = default;
};

struct FrameSize {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

struct RawExif {
  ByteOrder byte_order = ByteOrder::little;
  std::map<ExifKey, ExifEntry> entries;
  bool has_gps_ifd = false;
  // From the first SOF0/SOF1/SOF2 header after the APP1 segment, if any.
  std::optional<FrameSize> frame_size;

  const ExifEntry* find(Ifd ifd, std::uint16_t tag) const;
};

namespace exif_tag {
inline constexpr std::uint16_t exif_ifd_pointer = 0x8769;
inline constexpr std::uint16_t gps_ifd_pointer = 0x8825;

inline constexpr std::uint16_t gps_latitude_ref = 0x0001;
inline constexpr std::uint16_t gps_latitude = 0x0002;
inline constexpr std::uint16_t gps_longitude_ref = 0x0003;
inline constexpr std::uint16_t gps_longitude = 0x0004;
inline constexpr std::uint16_t gps_altitude_ref = 0x0005;
inline constexpr std::uint16_t gps_altitude = 0x0006;
inline constexpr std::uint16_t gps_img_direction_ref = 0x0010;
inline constexpr std::uint16_t gps_img_direction = 0x0011;
inline constexpr std::uint16_t gps_map_datum = 0x0012;

inline constexpr std::uint16_t date_time_original = 0x9003;
inline constexpr std::uint16_t pixel_x_dimension = 0xA002;
inline constexpr std::uint16_t pixel_y_dimension = 0xA003;
inline constexpr std::uint16_t focal_length_35mm = 0xA405;
}  // namespace exif_tag

// TIFF field types used by EXIF.
namespace tiff_type {
inline constexpr std::uint16_t byte = 1;
inline constexpr std::uint16_t ascii = 2;
inline constexpr std::uint16_t short_ = 3;
inline constexpr std::uint16_t long_ = 4;
inline constexpr std::uint16_t rational = 5;
inline constexpr std::uint16_t undefined = 7;
inline constexpr std::uint16_t srational = 10;
inline constexpr std::uint16_t ifd = 13;
}  // namespace tiff_type

// Scans JPEG segments for the APP1 "Exif\0\0" block and decodes IFD0, the
// Exif sub-IFD and the GPS sub-IFD. Total over arbitrary input: returns or
// throws Error with one of not_jpeg, no_exif_segment, bad_tiff_header,
// truncated. Never reads outside `bytes`.
RawExif parse_jpeg_exif(std::span<const std::uint8_t> bytes);

// Decodes a bare TIFF structure (the APP1 payload after "Exif\0\0").
RawExif parse_tiff(std::span<const std::uint8_t> tiff);

// Degrees from a GPS (degrees, minutes, seconds) rational triple.
// Throws Error(zero_denominator).
double dms_to_degrees(const URational& d, const URational& m, const URational& s);

// Lifts the geotag, heading, field of view, pixel size and capture time out
// of decoded EXIF. Pitch and camera height always come from `defaults`.
CameraFix extract_camera_fix(const RawExif& exif, const PipelineConfig& defaults, Id image_id = {});

// 2 atan(36 / (2 f35)) in degrees.
double hfov_from_35mm_focal(double f35_mm) noexcept;

}  // namespace litter
