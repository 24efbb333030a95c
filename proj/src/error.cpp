#include "litter/error.hpp"

namespace litter {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::not_jpeg: return "NotJpeg";
    case Errc::no_exif_segment: return "NoExifSegment";
    case Errc::bad_tiff_header: return "BadTiffHeader";
    case Errc::truncated: return "Truncated";
    case Errc::no_geotag: return "NoGeotag";
    case Errc::zero_denominator: return "ZeroDenominator";
    case Errc::no_heading: return "NoHeading";
    case Errc::no_image_size: return "NoImageSize";
    case Errc::malformed_json: return "MalformedJson";
    case Errc::missing_field: return "MissingField";
    case Errc::dangling_reference: return "DanglingReference";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::pole_undefined: return "PoleUndefined";
    case Errc::image_set_mismatch: return "ImageSetMismatch";
    case Errc::store_corrupt: return "StoreCorrupt";
    case Errc::duplicate_run: return "DuplicateRun";
    case Errc::out_of_cone: return "OutOfCone";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::io: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace litter
