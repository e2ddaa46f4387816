#include "vsl/frame_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "vsl/error.hpp"
#include "vsl/parallel.hpp"

namespace vsl {
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::NotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_png(const std::vector<std::uint8_t>& bytes) {
  static constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::equal(kSignature, kSignature + 8, bytes.begin());
}

class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  long next_int() {
    skip_space_and_comments();
    long value = 0;
    bool any = false;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 30)) fail(ErrorCode::UnsupportedFormat, "PGM header value too large");
      ++pos_;
      any = true;
    }
    if (!any) fail(ErrorCode::UnsupportedFormat, "malformed PGM header");
    return value;
  }

  std::size_t position() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 2;
};

LumaRaster decode_pgm(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    fail(ErrorCode::UnsupportedFormat, path.string() + " is not a binary PGM (P5)");
  PgmHeaderReader header(bytes);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  if (maxval != 255)
    fail(ErrorCode::UnsupportedFormat,
         path.string() + ": only maxval 255 PGM is supported (maxval " + std::to_string(maxval) + ")");
  if (width <= 0 || height <= 0) fail(ErrorCode::UnsupportedFormat, path.string() + ": empty image");
  header.advance(1);  // single whitespace byte after maxval
  const std::size_t offset = header.position();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < offset + count)
    fail(ErrorCode::UnsupportedFormat, path.string() + ": truncated PGM raster");
  LumaRaster pixels(height, width);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(offset), count, pixels.data());
  return pixels;
}

Frame decode_png(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    fail(ErrorCode::UnsupportedFormat, path.string() + ": " + image.message);
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    fail(ErrorCode::UnsupportedFormat, path.string() + ": only 8-bit PNG is supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr))
    fail(ErrorCode::UnsupportedFormat, path.string() + ": " + image.message);

  if (color) {
    RgbImage rgb{image.width, image.height, std::move(buffer)};
    return to_luma(rgb);
  }
  LumaRaster pixels(image.height, image.width);
  std::copy(buffer.begin(), buffer.end(), pixels.data());
  return Frame(std::move(pixels));
}

}  // namespace

std::uint8_t luma_of(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // Integer form of round(0.299 R + 0.587 G + 0.114 B); all terms are non-negative.
  const unsigned scaled = 299u * r + 587u * g + 114u * b;
  return static_cast<std::uint8_t>(std::min(255u, (scaled + 500u) / 1000u));
}

Frame to_luma(const RgbImage& image) {
  require(image.rgb.size() == static_cast<std::size_t>(image.width * image.height * 3),
          ErrorCode::InconsistentDimensions, "RGB buffer size does not match dimensions");
  LumaRaster pixels(image.height, image.width);
  for (Eigen::Index i = 0; i < pixels.size(); ++i) {
    const auto* px = &image.rgb[static_cast<std::size_t>(3 * i)];
    pixels.data()[i] = luma_of(px[0], px[1], px[2]);
  }
  return Frame(std::move(pixels));
}

std::string format_index(const std::string& pattern, long index) {
  const auto percent = pattern.find('%');
  require(percent != std::string::npos, ErrorCode::InvalidParameter,
          "filename pattern must contain an integer conversion: " + pattern);
  auto end = percent + 1;
  while (end < pattern.size() && (std::isdigit(pattern[end]) || pattern[end] == '0')) ++end;
  require(end < pattern.size() && (pattern[end] == 'd' || pattern[end] == 'i'),
          ErrorCode::InvalidParameter, "unsupported conversion in pattern: " + pattern);
  require(pattern.find('%', end + 1) == std::string::npos, ErrorCode::InvalidParameter,
          "pattern must contain exactly one conversion: " + pattern);
  const std::string spec = pattern.substr(percent, end - percent) + "ld";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, spec.c_str(), index);
  return pattern.substr(0, percent) + buffer + pattern.substr(end + 1);
}

Frame read_frame(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (is_png(bytes)) return decode_png(bytes, path);
  return Frame(decode_pgm(bytes, path));
}

FrameSequence load_frame_sequence(const fs::path& directory, const std::string& filename_pattern,
                                  long first, long last, int workers) {
  require(last >= first, ErrorCode::InvalidParameter, "empty frame range");
  if (!fs::is_directory(directory))
    fail(ErrorCode::NotFound, "frame directory " + directory.string());

  const auto count = static_cast<std::size_t>(last - first + 1);
  std::vector<fs::path> paths(count);
  for (std::size_t k = 0; k < count; ++k) {
    const long index = first + static_cast<long>(k);
    paths[k] = directory / format_index(filename_pattern, index);
    if (!fs::exists(paths[k])) throw NotFoundError(index, paths[k].string());
  }

  FrameSequence sequence;
  sequence.frame_index_origin = first;
  sequence.frames.resize(count);
  parallel_for(count, workers, [&](std::size_t k) { sequence.frames[k] = read_frame(paths[k]); });

  for (std::size_t k = 1; k < count; ++k) {
    const auto& f = sequence.frames[k];
    if (f.width() != sequence.width() || f.height() != sequence.height())
      fail(ErrorCode::InconsistentDimensions,
           "frame " + std::to_string(first + static_cast<long>(k)) + " is " +
               std::to_string(f.width()) + "x" + std::to_string(f.height()) + ", expected " +
               std::to_string(sequence.width()) + "x" + std::to_string(sequence.height()));
  }
  return sequence;
}

GroundTruthMask binarize_mask(const LumaRaster& pixels) {
  return GroundTruthMask{(pixels > std::uint8_t{127}).cast<std::uint8_t>()};
}

GroundTruthMask load_mask(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (is_png(bytes)) return binarize_mask(decode_png(bytes, path).luma);
  return binarize_mask(decode_pgm(bytes, path));
}

GroundTruthMask load_mask(const fs::path& path, Eigen::Index expected_height,
                          Eigen::Index expected_width) {
  auto mask = load_mask(path);
  if (mask.height() != expected_height || mask.width() != expected_width)
    fail(ErrorCode::InconsistentDimensions, path.string() + " does not match frame dimensions");
  return mask;
}

void write_pgm(const fs::path& path, const LumaRaster& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::NotFound, "cannot write " + path.string());
  out << "P5\n" << pixels.cols() << ' ' << pixels.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), pixels.size());
}

LumaRaster read_pgm(const fs::path& path) { return decode_pgm(read_bytes(path), path); }

void write_png(const fs::path& path, const LumaRaster& pixels) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(pixels.cols());
  image.height = static_cast<png_uint_32>(pixels.rows());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr))
    fail(ErrorCode::NotFound, "cannot write " + path.string() + ": " + image.message);
}

void write_png_rgb(const fs::path& path, const RgbImage& rgb) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(rgb.width);
  image.height = static_cast<png_uint_32>(rgb.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, rgb.rgb.data(), 0, nullptr))
    fail(ErrorCode::NotFound, "cannot write " + path.string() + ": " + image.message);
}

}  // namespace vsl
