#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace litter {

// Typed failure kinds surfaced by the library. Each maps to one documented
// error of a pipeline operation.
enum class Errc {
  not_jpeg,
  no_exif_segment,
  bad_tiff_header,
  truncated,
  no_geotag,
  zero_denominator,
  no_heading,
  no_image_size,
  malformed_json,
  missing_field,
  dangling_reference,
  invalid_config,
  pole_undefined,
  image_set_mismatch,
  store_corrupt,
  duplicate_run,
  out_of_cone,
  out_of_range,
  io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace litter
