#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>

#include "vsl/error.hpp"

namespace vsl::detail {

// On-disk formats are little-endian.
static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) fail(ErrorCode::NotFound, "cannot write " + path.string());
  }

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    bytes(&value, sizeof value);
  }

  void finish() {
    out_.flush();
    if (!out_) fail(ErrorCode::NotFound, "write failed");
  }

 private:
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path)
      : in_(path, std::ios::binary), path_(path.string()) {
    if (!in_) fail(ErrorCode::NotFound, "cannot open " + path_);
  }

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in_) fail(ErrorCode::UnsupportedFormat, path_ + ": truncated file");
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value;
    bytes(&value, sizeof value);
    return value;
  }

  void expect_magic(const char (&magic)[9]) {
    char found[8];
    bytes(found, 8);
    if (std::memcmp(found, magic, 8) != 0)
      fail(ErrorCode::UnsupportedFormat, path_ + ": bad magic");
  }

  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
};

}  // namespace vsl::detail
