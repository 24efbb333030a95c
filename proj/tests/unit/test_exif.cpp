#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "exif_builder.hpp"
#include "litter/error.hpp"
#include "litter/exif.hpp"
#include "test_env.hpp"

using namespace litter;
namespace lt = litter::testing;
using litter::testing::campus_frame;
using litter::testing::TiffBuilder;

namespace {

Errc error_of(const std::vector<std::uint8_t>& bytes, bool extract = true) {
  try {
    const RawExif raw = parse_jpeg_exif(bytes);
    if (extract) extract_camera_fix(raw, PipelineConfig{});
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io;  // stands in for "no error"
}

}  // namespace

TEST(Exif, LittleEndianFixtureHeader) {
  const auto bytes = lt::slurp_bytes(lt::fixture("exif/gps_nw_le.jpg"));
  const RawExif raw = parse_jpeg_exif(bytes);
  EXPECT_EQ(raw.byte_order, ByteOrder::little);
  EXPECT_TRUE(raw.has_gps_ifd);
  EXPECT_EQ(parse_jpeg_exif(lt::slurp_bytes(lt::fixture("exif/gps_nw_be.jpg"))).byte_order,
            ByteOrder::big);
}

TEST(Exif, ByteOrdersDecodeToSameEntries) {
  const RawExif le = parse_jpeg_exif(campus_frame(ByteOrder::little).jpeg());
  const RawExif be = parse_jpeg_exif(campus_frame(ByteOrder::big).jpeg());
  EXPECT_EQ(le.entries, be.entries);
  const RawExif fle = parse_jpeg_exif(lt::slurp_bytes(lt::fixture("exif/gps_nw_le.jpg")));
  const RawExif fbe = parse_jpeg_exif(lt::slurp_bytes(lt::fixture("exif/gps_nw_be.jpg")));
  EXPECT_EQ(fle.entries, fbe.entries);
  EXPECT_FALSE(fle.entries.empty());
}

TEST(Exif, CorpusMatchesIndependentReader) {
  const auto ref = nlohmann::json::parse(lt::slurp(lt::fixture("exif/reference.json")));
  ASSERT_GE(ref.size(), 6u);
  for (const auto& [name, want] : ref.items()) {
    SCOPED_TRACE(name);
    const auto bytes = lt::slurp_bytes(lt::fixture("exif/" + name));
    if (want.contains("error")) {
      const Errc code = error_of(bytes);
      EXPECT_EQ(to_string(code), want["error"].get<std::string>());
      continue;
    }
    const CameraFix fix = extract_camera_fix(parse_jpeg_exif(bytes), PipelineConfig{}, Id(name));
    EXPECT_NEAR(fix.position.lat_deg, want["lat"].get<double>(), 1e-7);
    EXPECT_NEAR(fix.position.lon_deg, want["lon"].get<double>(), 1e-7);
    EXPECT_EQ(fix.image_w_px, want["width"].get<std::uint32_t>());
    EXPECT_EQ(fix.image_h_px, want["height"].get<std::uint32_t>());
    if (want.contains("heading_raw")) {
      EXPECT_NEAR(fix.heading_deg, std::fmod(want["heading_raw"].get<double>(), 360.0), 1e-9);
      EXPECT_EQ(fix.heading_source,
                want["heading_ref"] == "M" ? HeadingSource::magnetic : HeadingSource::true_north);
    } else {
      EXPECT_EQ(fix.heading_source, HeadingSource::assumed);
    }
    if (want.contains("focal_35mm"))
      EXPECT_NEAR(fix.hfov_deg, 2 * std::atan(36.0 / (2 * want["focal_35mm"].get<double>())) * 180 / std::numbers::pi,
                  1e-9);
    else
      EXPECT_DOUBLE_EQ(fix.hfov_deg, PipelineConfig{}.hfov_deg);
    if (want.contains("datetime_original"))
      EXPECT_EQ(fix.captured_at, parse_utc(want["datetime_original"].get<std::string>()));
    else
      EXPECT_FALSE(fix.captured_at);
  }
}

TEST(Exif, CampusLatitudeByHand) {
  // 38 + 33/60 + 40.2/3600
  EXPECT_NEAR(dms_to_degrees({38, 1}, {33, 1}, {4020, 100}), 38.5611667, 1e-7);
  const auto n = extract_camera_fix(parse_jpeg_exif(campus_frame(ByteOrder::big, 'N').jpeg()), {});
  const auto s = extract_camera_fix(parse_jpeg_exif(campus_frame(ByteOrder::big, 'S').jpeg()), {});
  EXPECT_NEAR(n.position.lat_deg, 38.5611667, 1e-7);
  EXPECT_NEAR(s.position.lat_deg, -38.5611667, 1e-7);
  EXPECT_NEAR(n.hfov_deg, 69.39, 0.01);
  EXPECT_DOUBLE_EQ(n.heading_deg, 271.5);
}

TEST(Exif, DmsIsMonotoneAndBounded) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5000; ++i) {
    const std::uint32_t d = rng() % 90, m = rng() % 60, s100 = rng() % 6000;
    const double v = dms_to_degrees({d, 1}, {m, 1}, {s100, 100});
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 90.0);
    EXPECT_LT(v, dms_to_degrees({d + 1, 1}, {m, 1}, {s100, 100}));
    EXPECT_LT(v, dms_to_degrees({d, 1}, {m + 1, 1}, {s100, 100}));
    EXPECT_LT(v, dms_to_degrees({d, 1}, {m, 1}, {s100 + 1, 100}));
  }
  EXPECT_THROW(dms_to_degrees({1, 0}, {0, 1}, {0, 1}), Error);
}

TEST(Exif, HeadingAlwaysNormalised) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t raw = static_cast<std::uint32_t>(rng() % 100000);
    TiffBuilder b = campus_frame(i % 2 ? ByteOrder::big : ByteOrder::little);
    b.rationals(Ifd::gps, exif_tag::gps_img_direction, {{raw, 10}});
    const auto fix = extract_camera_fix(parse_jpeg_exif(b.jpeg()), {});
    EXPECT_GE(fix.heading_deg, 0.0);
    EXPECT_LT(fix.heading_deg, 360.0);
    EXPECT_NEAR(fix.heading_deg, std::fmod(raw / 10.0, 360.0), 1e-9);
  }
}

TEST(Exif, MissingHeadingPolicy) {
  TiffBuilder b(ByteOrder::little);
  b.ascii(Ifd::gps, exif_tag::gps_latitude_ref, "N")
      .rationals(Ifd::gps, exif_tag::gps_latitude, {{10, 1}, {0, 1}, {0, 1}})
      .ascii(Ifd::gps, exif_tag::gps_longitude_ref, "E")
      .rationals(Ifd::gps, exif_tag::gps_longitude, {{20, 1}, {0, 1}, {0, 1}});
  const RawExif raw = parse_jpeg_exif(b.jpeg(640, 480));
  PipelineConfig cfg;
  cfg.heading_deg = 45;
  const auto fix = extract_camera_fix(raw, cfg);
  EXPECT_EQ(fix.heading_source, HeadingSource::assumed);
  EXPECT_DOUBLE_EQ(fix.heading_deg, 45.0);
  EXPECT_EQ(fix.image_w_px, 640u);
  EXPECT_EQ(fix.image_h_px, 480u);
  cfg.require_heading = true;
  try {
    extract_camera_fix(raw, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_heading);
  }
}

TEST(Exif, ZeroFocalLengthFallsBackToDefault) {
  TiffBuilder b = campus_frame(ByteOrder::little);
  b.shorts(Ifd::exif, exif_tag::focal_length_35mm, {0});
  PipelineConfig cfg;
  cfg.hfov_deg = 50;
  EXPECT_DOUBLE_EQ(extract_camera_fix(parse_jpeg_exif(b.jpeg()), cfg).hfov_deg, 50.0);
}

TEST(Exif, TypedErrors) {
  EXPECT_EQ(error_of({0x89, 'P', 'N', 'G'}), Errc::not_jpeg);
  EXPECT_EQ(error_of({}), Errc::not_jpeg);
  EXPECT_EQ(error_of({0xFF, 0xD8, 0xFF, 0xD9}), Errc::no_exif_segment);
  EXPECT_EQ(error_of(campus_frame(ByteOrder::little).magic(43).jpeg()), Errc::bad_tiff_header);

  TiffBuilder no_gps(ByteOrder::big);
  no_gps.longs(Ifd::exif, exif_tag::pixel_x_dimension, {100});
  EXPECT_EQ(error_of(no_gps.jpeg()), Errc::no_geotag);
  TiffBuilder empty_gps(ByteOrder::big);
  empty_gps.empty_gps();
  EXPECT_EQ(error_of(empty_gps.jpeg()), Errc::no_geotag);

  TiffBuilder zero = campus_frame(ByteOrder::little);
  zero.rationals(Ifd::gps, exif_tag::gps_latitude, {{38, 1}, {33, 0}, {0, 1}});
  EXPECT_EQ(error_of(zero.jpeg()), Errc::zero_denominator);
}

TEST(Exif, TruncationInsideIfdIsTypedNotCrash) {
  const auto tiff = campus_frame(ByteOrder::little).tiff();
  for (std::size_t cut = 0; cut < tiff.size(); ++cut) {
    std::vector<std::uint8_t> partial(tiff.begin(), tiff.begin() + static_cast<std::ptrdiff_t>(cut));
    // The APP1 length still claims the full block, so the file ends mid-segment.
    auto jpeg = TiffBuilder::wrap_jpeg(tiff);
    jpeg.resize(2 + 4 + 6 + cut);
    EXPECT_EQ(error_of(jpeg, false), Errc::truncated) << cut;
    // A consistent but short TIFF inside a well-formed segment.
    try {
      parse_tiff(partial);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == Errc::truncated || e.code() == Errc::bad_tiff_header) << cut;
    }
  }
}

TEST(Exif, RandomBytesNeverEscapeTypedErrors) {
  std::mt19937_64 rng(99);
  const auto seed = campus_frame(ByteOrder::big).jpeg();
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::uint8_t> buf;
    if (i % 2 == 0) {
      buf.resize(rng() % 512);
      for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
      if (i % 4 == 0 && buf.size() >= 2) buf[0] = 0xFF, buf[1] = 0xD8;
    } else {
      buf = seed;
      for (int k = 0; k < 1 + static_cast<int>(rng() % 8); ++k) buf[rng() % buf.size()] = static_cast<std::uint8_t>(rng());
    }
    try {
      const RawExif raw = parse_jpeg_exif(buf);
      extract_camera_fix(raw, PipelineConfig{});
    } catch (const Error&) {
    }
  }
}
