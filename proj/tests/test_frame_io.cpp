#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "vsl/error.hpp"
#include "vsl/frame_io.hpp"
#include "vsl/rng.hpp"

using namespace vsl;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidParameter;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::path(::testing::TempDir()) / ("vsl_frame_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

LumaRaster random_raster(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  LumaRaster r(rows, cols);
  for (auto& v : r.reshaped()) v = static_cast<std::uint8_t>(rng.below(256));
  return r;
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

}  // namespace

TEST(Luma, Examples) {
  EXPECT_EQ(luma_of(255, 255, 255), 255);
  EXPECT_EQ(luma_of(0, 0, 0), 0);
  EXPECT_EQ(luma_of(255, 0, 0), 76);
  EXPECT_EQ(luma_of(0, 255, 0), 150);
  EXPECT_EQ(luma_of(0, 0, 255), 29);
}

TEST(Luma, MonotoneInEachChannel) {
  for (int a = 0; a < 256; a += 15)
    for (int b = 0; b < 256; b += 15)
      for (int v = 1; v < 256; ++v) {
        const auto x = static_cast<std::uint8_t>(v), y = static_cast<std::uint8_t>(v - 1);
        const auto ua = static_cast<std::uint8_t>(a), ub = static_cast<std::uint8_t>(b);
        ASSERT_GE(luma_of(x, ua, ub), luma_of(y, ua, ub));
        ASSERT_GE(luma_of(ua, x, ub), luma_of(ua, y, ub));
        ASSERT_GE(luma_of(ua, ub, x), luma_of(ua, ub, y));
      }
}

TEST(Luma, ImageConversion) {
  RgbImage img{2, 1, {255, 0, 0, 10, 20, 30}};
  const auto f = to_luma(img);
  ASSERT_EQ(f.height(), 1);
  ASSERT_EQ(f.width(), 2);
  EXPECT_EQ(f.luma(0, 0), 76);
  EXPECT_EQ(f.luma(0, 1), luma_of(10, 20, 30));
}

TEST(FormatIndex, Patterns) {
  EXPECT_EQ(format_index("frame_%04d.pgm", 7), "frame_0007.pgm");
  EXPECT_EQ(format_index("f%d.png", 123), "f123.png");
  EXPECT_EQ(code_of([] { format_index("plain.png", 1); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { format_index("%d_%d.png", 1); }), ErrorCode::InvalidParameter);
}

TEST(Pgm, RoundTripIsBitIdentical) {
  Rng rng(1);
  const auto dir = fresh_dir("pgm");
  const auto pixels = random_raster(rng, 13, 17);
  write_pgm(dir / "a.pgm", pixels);
  EXPECT_TRUE((read_pgm(dir / "a.pgm") == pixels).all());
  EXPECT_EQ(read_frame(dir / "a.pgm"), Frame(pixels));
}

TEST(Pgm, HeaderWithComments) {
  const auto dir = fresh_dir("comments");
  write_bytes(dir / "c.pgm", std::string("P5\n# comment\n2 1\n255\n") + '\x05' + '\xfa');
  const auto f = read_frame(dir / "c.pgm");
  ASSERT_EQ(f.width(), 2);
  EXPECT_EQ(f.luma(0, 0), 5);
  EXPECT_EQ(f.luma(0, 1), 250);
}

TEST(Pgm, UnsupportedVariants) {
  const auto dir = fresh_dir("unsupported");
  write_bytes(dir / "wide.pgm", std::string("P5\n1 1\n65535\n") + '\x01' + '\x02');
  EXPECT_EQ(code_of([&] { read_frame(dir / "wide.pgm"); }), ErrorCode::UnsupportedFormat);
  write_bytes(dir / "small.pgm", std::string("P5\n1 1\n15\n") + '\x01');
  EXPECT_EQ(code_of([&] { read_frame(dir / "small.pgm"); }), ErrorCode::UnsupportedFormat);
  write_bytes(dir / "ascii.pgm", "P2\n1 1\n255\n7\n");
  EXPECT_EQ(code_of([&] { read_frame(dir / "ascii.pgm"); }), ErrorCode::UnsupportedFormat);
  write_bytes(dir / "short.pgm", "P5\n4 4\n255\nab");
  EXPECT_EQ(code_of([&] { read_frame(dir / "short.pgm"); }), ErrorCode::UnsupportedFormat);
  write_bytes(dir / "text.png", "hello");
  EXPECT_EQ(code_of([&] { read_frame(dir / "text.png"); }), ErrorCode::UnsupportedFormat);
}

TEST(Png, GrayAndRgbAreRead) {
  Rng rng(2);
  const auto dir = fresh_dir("png");
  const auto gray = random_raster(rng, 9, 11);
  write_png(dir / "g.png", gray);
  EXPECT_TRUE((read_frame(dir / "g.png").luma == gray).all());

  RgbImage rgb{3, 2, {}};
  for (int k = 0; k < 18; ++k) rgb.rgb.push_back(static_cast<std::uint8_t>(rng.below(256)));
  write_png_rgb(dir / "c.png", rgb);
  EXPECT_EQ(read_frame(dir / "c.png"), to_luma(rgb));
}

TEST(Sequence, LoadsInIndexOrder) {
  Rng rng(3);
  const auto dir = fresh_dir("seq");
  std::vector<LumaRaster> written;
  for (long t = 0; t < 12; ++t) {
    written.push_back(random_raster(rng, 6, 5));
    write_pgm(dir / format_index("frame_%04d.pgm", t), written.back());
  }
  for (int workers : {1, 4}) {
    const auto seq = load_frame_sequence(dir, "frame_%04d.pgm", 2, 10, workers);
    ASSERT_EQ(seq.size(), 9u);
    EXPECT_EQ(seq.frame_index_origin, 2);
    for (std::size_t k = 0; k < 9; ++k) EXPECT_TRUE((seq.frames[k].luma == written[k + 2]).all());
  }
}

TEST(Sequence, MissingFrameReportsIndex) {
  const auto dir = fresh_dir("missing");
  write_pgm(dir / "f0.pgm", LumaRaster::Zero(4, 4));
  write_pgm(dir / "f2.pgm", LumaRaster::Zero(4, 4));
  try {
    load_frame_sequence(dir, "f%d.pgm", 0, 2);
    FAIL() << "expected NotFound";
  } catch (const NotFoundError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFound);
    EXPECT_EQ(e.index(), 1);
  }
}

TEST(Sequence, InconsistentDimensions) {
  const auto dir = fresh_dir("dims");
  write_pgm(dir / "f0.pgm", LumaRaster::Zero(8, 12));
  write_pgm(dir / "f1.pgm", LumaRaster::Zero(8, 12));
  write_pgm(dir / "f2.pgm", LumaRaster::Zero(6, 9));
  EXPECT_EQ(code_of([&] { load_frame_sequence(dir, "f%d.pgm", 0, 2); }),
            ErrorCode::InconsistentDimensions);
}

TEST(Sequence, EmptyRangeIsRejected) {
  const auto dir = fresh_dir("empty");
  EXPECT_EQ(code_of([&] { load_frame_sequence(dir, "f%d.pgm", 3, 2); }), ErrorCode::InvalidParameter);
}

TEST(Mask, ThresholdConvention) {
  LumaRaster px(1, 4);
  px << 0, 127, 128, 255;
  const auto m = binarize_mask(px);
  EXPECT_EQ(m.labels(0, 0), 0);
  EXPECT_EQ(m.labels(0, 1), 0);
  EXPECT_EQ(m.labels(0, 2), 1);
  EXPECT_EQ(m.labels(0, 3), 1);
}

TEST(Mask, LoadAndValidate) {
  const auto dir = fresh_dir("mask");
  write_pgm(dir / "zero.pgm", LumaRaster::Zero(5, 6));
  write_pgm(dir / "full.pgm", LumaRaster::Constant(5, 6, 255));
  EXPECT_EQ(load_mask(dir / "zero.pgm").labels.cast<int>().sum(), 0);
  EXPECT_EQ(load_mask(dir / "full.pgm", 5, 6).labels.cast<int>().sum(), 30);
  EXPECT_EQ(code_of([&] { load_mask(dir / "full.pgm", 6, 5); }), ErrorCode::InconsistentDimensions);
  write_bytes(dir / "bad.pgm", "nope");
  EXPECT_EQ(code_of([&] { load_mask(dir / "bad.pgm"); }), ErrorCode::UnsupportedFormat);
}
