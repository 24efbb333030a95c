#include "litter/exif.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "litter/error.hpp"

namespace litter {

namespace {

constexpr std::uint8_t kMarkerPrefix = 0xFF;
constexpr std::uint8_t kSoi = 0xD8;
constexpr std::uint8_t kEoi = 0xD9;
constexpr std::uint8_t kSos = 0xDA;
constexpr std::uint8_t kApp1 = 0xE1;
constexpr std::uint8_t kSof0 = 0xC0;
constexpr std::uint8_t kSof1 = 0xC1;
constexpr std::uint8_t kSof2 = 0xC2;
constexpr char kExifHeader[6] = {'E', 'x', 'i', 'f', '\0', '\0'};

// Bounds-checked, endian-aware view over the TIFF block.
class TiffReader {
 public:
  TiffReader(std::span<const std::uint8_t> data, ByteOrder order) : data_(data), order_(order) {}

  std::size_t size() const noexcept { return data_.size(); }

  void require(std::uint64_t offset, std::uint64_t length, const char* what) const {
    if (offset > data_.size() || length > data_.size() - offset)
      throw Error(Errc::truncated, std::string(what) + " at offset " + std::to_string(offset) + " exceeds " +
                                       std::to_string(data_.size()) + "-byte TIFF block");
  }

  std::uint8_t u8(std::uint64_t offset) const {
    require(offset, 1, "byte");
    return data_[offset];
  }

  std::uint16_t u16(std::uint64_t offset) const {
    require(offset, 2, "short");
    const auto* p = data_.data() + offset;
    return order_ == ByteOrder::little ? static_cast<std::uint16_t>(p[0] | (p[1] << 8))
                                       : static_cast<std::uint16_t>((p[0] << 8) | p[1]);
  }

  std::uint32_t u32(std::uint64_t offset) const {
    require(offset, 4, "long");
    const auto* p = data_.data() + offset;
    if (order_ == ByteOrder::little)
      return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
             (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
  }

 private:
  std::span<const std::uint8_t> data_;
  ByteOrder order_;
};

// Size in bytes of one component, 0 for types we cannot size.
std::uint32_t component_size(std::uint16_t type) noexcept {
  switch (type) {
    case 1: case 2: case 6: case 7: return 1;
    case 3: case 8: return 2;
    case 4: case 9: case 11: case 13: return 4;
    case 5: case 10: case 12: return 8;
    default: return 0;
  }
}

bool wanted(Ifd ifd, std::uint16_t tag) noexcept {
  switch (ifd) {
    case Ifd::primary:
      return false;
    case Ifd::exif:
      return tag == exif_tag::date_time_original || tag == exif_tag::focal_length_35mm ||
             tag == exif_tag::pixel_x_dimension || tag == exif_tag::pixel_y_dimension;
    case Ifd::gps:
      return (tag >= exif_tag::gps_latitude_ref && tag <= exif_tag::gps_altitude) ||
             (tag >= exif_tag::gps_img_direction_ref && tag <= exif_tag::gps_map_datum);
  }
  return false;
}

std::optional<ExifValue> decode_value(const TiffReader& r, std::uint16_t type, std::uint32_t count,
                                      std::uint64_t at) {
  switch (type) {
    case tiff_type::ascii: {
      std::string s(count, '\0');
      for (std::uint32_t i = 0; i < count; ++i) s[i] = static_cast<char>(r.u8(at + i));
      return s;
    }
    case tiff_type::byte:
    case tiff_type::short_:
    case tiff_type::long_: {
      std::vector<std::uint32_t> v(count);
      for (std::uint32_t i = 0; i < count; ++i) {
        if (type == tiff_type::byte)
          v[i] = r.u8(at + i);
        else if (type == tiff_type::short_)
          v[i] = r.u16(at + 2ULL * i);
        else
          v[i] = r.u32(at + 4ULL * i);
      }
      return v;
    }
    case tiff_type::rational: {
      std::vector<URational> v(count);
      for (std::uint32_t i = 0; i < count; ++i) v[i] = {r.u32(at + 8ULL * i), r.u32(at + 8ULL * i + 4)};
      return v;
    }
    default:
      return std::nullopt;
  }
}

struct SubIfds {
  std::optional<std::uint32_t> exif;
  std::optional<std::uint32_t> gps;
};

SubIfds read_ifd(const TiffReader& r, std::uint32_t offset, Ifd ifd, RawExif& out) {
  SubIfds subs;
  const std::uint16_t n = r.u16(offset);
  r.require(offset + 2ULL, 12ULL * n, "IFD entries");
  for (std::uint16_t i = 0; i < n; ++i) {
    const std::uint64_t entry = offset + 2ULL + 12ULL * i;
    const std::uint16_t tag = r.u16(entry);
    const std::uint16_t type = r.u16(entry + 2);
    const std::uint32_t count = r.u32(entry + 4);
    const std::uint32_t unit = component_size(type);
    if (unit == 0) continue;

    const std::uint64_t bytes = static_cast<std::uint64_t>(unit) * count;
    const std::uint64_t at = bytes <= 4 ? entry + 8 : r.u32(entry + 8);
    r.require(at, bytes, "IFD value");

    if (ifd == Ifd::primary && count >= 1 && (type == tiff_type::long_ || type == tiff_type::ifd)) {
      if (tag == exif_tag::exif_ifd_pointer) subs.exif = r.u32(entry + 8);
      if (tag == exif_tag::gps_ifd_pointer) subs.gps = r.u32(entry + 8);
      continue;
    }
    if (!wanted(ifd, tag)) continue;
    if (auto value = decode_value(r, type, count, at))
      out.entries.emplace(ExifKey{ifd, tag}, ExifEntry{type, count, std::move(*value)});
  }
  return subs;
}

std::uint16_t be16(const std::uint8_t* p) noexcept { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

}  // namespace

const ExifEntry* RawExif::find(Ifd ifd, std::uint16_t tag) const {
  auto it = entries.find(ExifKey{ifd, tag});
  return it == entries.end() ? nullptr : &it->second;
}

RawExif parse_tiff(std::span<const std::uint8_t> tiff) {
  if (tiff.size() < 8) throw Error(Errc::truncated, "TIFF header needs 8 bytes, have " + std::to_string(tiff.size()));
  RawExif out;
  if (tiff[0] == 'I' && tiff[1] == 'I')
    out.byte_order = ByteOrder::little;
  else if (tiff[0] == 'M' && tiff[1] == 'M')
    out.byte_order = ByteOrder::big;
  else
    throw Error(Errc::bad_tiff_header, "byte-order mark is neither II nor MM");

  const TiffReader r(tiff, out.byte_order);
  if (r.u16(2) != 42) throw Error(Errc::bad_tiff_header, "check value is not 42");

  const SubIfds subs = read_ifd(r, r.u32(4), Ifd::primary, out);
  if (subs.exif) read_ifd(r, *subs.exif, Ifd::exif, out);
  if (subs.gps) {
    out.has_gps_ifd = true;
    read_ifd(r, *subs.gps, Ifd::gps, out);
  }
  return out;
}

RawExif parse_jpeg_exif(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != kMarkerPrefix || bytes[1] != kSoi) throw Error(Errc::not_jpeg, "missing SOI marker");

  std::optional<RawExif> exif;
  std::optional<FrameSize> frame;
  bool truncated = false;
  std::size_t pos = 2;

  while (pos < bytes.size()) {
    if (bytes[pos] != kMarkerPrefix) break;
    while (pos < bytes.size() && bytes[pos] == kMarkerPrefix) ++pos;
    if (pos >= bytes.size()) {
      truncated = true;
      break;
    }
    const std::uint8_t marker = bytes[pos++];
    if (marker == kEoi || marker == kSos) break;
    if ((marker >= 0xD0 && marker <= 0xD7) || marker == 0x01) continue;

    if (bytes.size() - pos < 2) {
      truncated = true;
      break;
    }
    const std::size_t length = be16(bytes.data() + pos);
    if (length < 2 || length > bytes.size() - pos) {
      truncated = true;
      break;
    }
    const auto payload = bytes.subspan(pos + 2, length - 2);

    if (marker == kApp1 && !exif && payload.size() >= sizeof kExifHeader &&
        std::memcmp(payload.data(), kExifHeader, sizeof kExifHeader) == 0) {
      exif = parse_tiff(payload.subspan(sizeof kExifHeader));
    } else if ((marker == kSof0 || marker == kSof1 || marker == kSof2) && !frame && payload.size() >= 5) {
      frame = FrameSize{be16(payload.data() + 3), be16(payload.data() + 1)};
    }
    pos += length;
  }

  if (!exif) {
    if (truncated) throw Error(Errc::truncated, "JPEG segment runs past end of file before any Exif block");
    throw Error(Errc::no_exif_segment, "no APP1 segment with an Exif header");
  }
  if (frame && frame->width > 0 && frame->height > 0) exif->frame_size = frame;
  return std::move(*exif);
}

double dms_to_degrees(const URational& d, const URational& m, const URational& s) {
  if (d.den == 0 || m.den == 0 || s.den == 0) throw Error(Errc::zero_denominator, "GPS coordinate rational");
  return static_cast<double>(d.num) / d.den + static_cast<double>(m.num) / m.den / 60.0 +
         static_cast<double>(s.num) / s.den / 3600.0;
}

double hfov_from_35mm_focal(double f35_mm) noexcept { return rad_to_deg(2.0 * std::atan(36.0 / (2.0 * f35_mm))); }

namespace {

std::string text_of(const ExifEntry* e) {
  if (!e) return {};
  const auto* s = std::get_if<std::string>(&e->value);
  if (!s) return {};
  return s->substr(0, s->find('\0'));
}

const std::vector<URational>* rationals_of(const ExifEntry* e) {
  return e ? std::get_if<std::vector<URational>>(&e->value) : nullptr;
}

std::optional<std::uint32_t> uint_of(const ExifEntry* e) {
  if (!e) return std::nullopt;
  const auto* v = std::get_if<std::vector<std::uint32_t>>(&e->value);
  if (!v || v->empty()) return std::nullopt;
  return v->front();
}

double coordinate(const RawExif& exif, std::uint16_t ref_tag, std::uint16_t value_tag, char positive,
                  char negative, double limit) {
  const std::string ref = text_of(exif.find(Ifd::gps, ref_tag));
  const auto* dms = rationals_of(exif.find(Ifd::gps, value_tag));
  if (ref.empty() || !dms || dms->size() < 3)
    throw Error(Errc::no_geotag, (value_tag == exif_tag::gps_latitude ? std::string("latitude") : "longitude") +
                                     " tag or its reference is missing");
  double sign = 0.0;
  if (ref[0] == positive)
    sign = 1.0;
  else if (ref[0] == negative)
    sign = -1.0;
  else
    throw Error(Errc::no_geotag, "unexpected hemisphere reference '" + ref + "'");
  const double magnitude = dms_to_degrees((*dms)[0], (*dms)[1], (*dms)[2]);
  if (!(magnitude <= limit)) throw Error(Errc::no_geotag, "coordinate magnitude " + std::to_string(magnitude) + " out of range");
  return sign * magnitude;
}

}  // namespace

CameraFix extract_camera_fix(const RawExif& exif, const PipelineConfig& defaults, Id image_id) {
  if (!exif.has_gps_ifd) throw Error(Errc::no_geotag, "no GPS IFD");

  CameraFix fix;
  fix.image_id = std::move(image_id);
  fix.position.lat_deg = coordinate(exif, exif_tag::gps_latitude_ref, exif_tag::gps_latitude, 'N', 'S', 90.0);
  fix.position.lon_deg = coordinate(exif, exif_tag::gps_longitude_ref, exif_tag::gps_longitude, 'E', 'W', 180.0);

  const auto* direction = rationals_of(exif.find(Ifd::gps, exif_tag::gps_img_direction));
  if (direction && !direction->empty()) {
    const URational& r = direction->front();
    if (r.den == 0) throw Error(Errc::zero_denominator, "GPSImgDirection");
    fix.heading_deg = normalize_bearing(static_cast<double>(r.num) / r.den);
    const std::string ref = text_of(exif.find(Ifd::gps, exif_tag::gps_img_direction_ref));
    fix.heading_source = (!ref.empty() && ref[0] == 'M') ? HeadingSource::magnetic : HeadingSource::true_north;
  } else if (defaults.require_heading) {
    throw Error(Errc::no_heading, "GPSImgDirection absent");
  } else {
    fix.heading_deg = normalize_bearing(defaults.heading_deg);
    fix.heading_source = HeadingSource::assumed;
  }

  const auto f35 = uint_of(exif.find(Ifd::exif, exif_tag::focal_length_35mm));
  fix.hfov_deg = (f35 && *f35 > 0) ? hfov_from_35mm_focal(*f35) : defaults.hfov_deg;
  fix.pitch_deg = defaults.pitch_deg;
  fix.camera_height_m = defaults.camera_height_m;

  const auto w = uint_of(exif.find(Ifd::exif, exif_tag::pixel_x_dimension));
  const auto h = uint_of(exif.find(Ifd::exif, exif_tag::pixel_y_dimension));
  if (w && h && *w > 0 && *h > 0) {
    fix.image_w_px = *w;
    fix.image_h_px = *h;
  } else if (exif.frame_size) {
    fix.image_w_px = exif.frame_size->width;
    fix.image_h_px = exif.frame_size->height;
  } else {
    throw Error(Errc::no_image_size, "neither Pixel{X,Y}Dimension nor a JPEG frame header");
  }

  if (const std::string when = text_of(exif.find(Ifd::exif, exif_tag::date_time_original)); !when.empty())
    fix.captured_at = parse_utc(when);
  return fix;
}

}  // namespace litter
