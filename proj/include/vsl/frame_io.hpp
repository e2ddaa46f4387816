#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vsl {

using LumaRaster = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using LabelRaster = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8-bit luma frame; pixel (row, col) is luma(row, col).
struct Frame {
  LumaRaster luma;

  Frame() = default;
  explicit Frame(LumaRaster pixels) : luma(std::move(pixels)) {}
  Frame(Eigen::Index height, Eigen::Index width, std::uint8_t fill = 0)
      : luma(LumaRaster::Constant(height, width, fill)) {}

  Eigen::Index width() const { return luma.cols(); }
  Eigen::Index height() const { return luma.rows(); }

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.luma.rows() == b.luma.rows() && a.luma.cols() == b.luma.cols() &&
           (a.luma == b.luma).all();
  }
};

/// Non-empty ordered list of equally sized frames.
struct FrameSequence {
  std::vector<Frame> frames;
  long frame_index_origin = 0;

  Eigen::Index width() const { return frames.empty() ? 0 : frames.front().width(); }
  Eigen::Index height() const { return frames.empty() ? 0 : frames.front().height(); }
  std::size_t size() const { return frames.size(); }
};

/// Binary forgery labels: 0 = pristine, 1 = forged.
struct GroundTruthMask {
  LabelRaster labels;

  Eigen::Index width() const { return labels.cols(); }
  Eigen::Index height() const { return labels.rows(); }
};

/// Interleaved 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  std::vector<std::uint8_t> rgb;
};

/// BT.601 luma of a single pixel, rounded to nearest.
std::uint8_t luma_of(std::uint8_t r, std::uint8_t g, std::uint8_t b);

Frame to_luma(const RgbImage& image);

/// Expands a printf-style pattern containing one integer conversion, e.g.
/// "frame_%04d.png".
std::string format_index(const std::string& pattern, long index);

/// Reads a P5 (maxval 255) PGM or an 8-bit grayscale/RGB(A) PNG, converting
/// colour to luma. Dispatches on file content, not extension.
Frame read_frame(const std::filesystem::path& path);

/// Loads frames first..last (inclusive) in index order. `workers` bounds the
/// number of files decoded concurrently.
FrameSequence load_frame_sequence(const std::filesystem::path& directory,
                                  const std::string& filename_pattern, long first, long last,
                                  int workers = 1);

GroundTruthMask load_mask(const std::filesystem::path& path);
GroundTruthMask load_mask(const std::filesystem::path& path, Eigen::Index expected_height,
                          Eigen::Index expected_width);

/// Binarizes an 8-bit raster with the >127 convention.
GroundTruthMask binarize_mask(const LumaRaster& pixels);

void write_pgm(const std::filesystem::path& path, const LumaRaster& pixels);
LumaRaster read_pgm(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const LumaRaster& pixels);
void write_png_rgb(const std::filesystem::path& path, const RgbImage& image);

}  // namespace vsl
