#include "vsl/feature_io.hpp"

#include <fstream>
#include <iomanip>
#include <vector>

#include "binary_io.hpp"

namespace vsl {

namespace {
constexpr char kMagic[9] = "VSLFEATS";
}

void write_feature_field(const std::filesystem::path& path, const FeatureField& field) {
  detail::BinaryWriter out(path);
  out.bytes(kMagic, 8);
  out.put<std::uint32_t>(kFeatureFileVersion);
  out.put<std::uint32_t>(static_cast<std::uint32_t>(field.config.symmetry));
  out.put<double>(field.config.quantizer.step);
  out.put<std::int32_t>(field.config.quantizer.truncation);
  for (std::int64_t v : {field.config.geometry.patch, field.config.geometry.stride,
                         field.frame_height, field.frame_width, field.grid.rows, field.grid.cols,
                         field.dim(), field.frame_count()})
    out.put<std::int64_t>(v);
  for (long index : field.frame_indices) out.put<std::int64_t>(index);

  const Eigen::MatrixXf single = field.values.cast<float>();
  out.bytes(single.data(), static_cast<std::size_t>(single.size()) * sizeof(float));
  out.finish();
}

FeatureField read_feature_field(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kMagic);
  const auto version = in.get<std::uint32_t>();
  if (version != kFeatureFileVersion)
    fail(ErrorCode::UnsupportedFormat,
         in.path() + ": unsupported feature file version " + std::to_string(version));
  const auto symmetry = in.get<std::uint32_t>();
  if (symmetry > 3) fail(ErrorCode::UnsupportedFormat, in.path() + ": bad symmetry tag");

  FeatureField field;
  field.config.symmetry = static_cast<Symmetry>(symmetry);
  field.config.quantizer.step = in.get<double>();
  field.config.quantizer.truncation = in.get<std::int32_t>();
  field.config.geometry.patch = in.get<std::int64_t>();
  field.config.geometry.stride = in.get<std::int64_t>();
  field.frame_height = in.get<std::int64_t>();
  field.frame_width = in.get<std::int64_t>();
  field.grid.rows = in.get<std::int64_t>();
  field.grid.cols = in.get<std::int64_t>();
  const auto dim = in.get<std::int64_t>();
  const auto frames = in.get<std::int64_t>();

  if (dim <= 0 || frames <= 0 || field.config.quantizer.truncation < 1 ||
      field.grid != grid_shape(field.frame_height, field.frame_width, field.config.geometry))
    fail(ErrorCode::UnsupportedFormat, in.path() + ": inconsistent header");
  if (dim != SymmetryMerger(field.config.symmetry, field.config.quantizer.truncation).output_dim())
    fail(ErrorCode::UnsupportedFormat, in.path() + ": dimension does not match symmetry");

  field.frame_indices.resize(static_cast<std::size_t>(frames));
  for (auto& index : field.frame_indices) index = in.get<std::int64_t>();

  Eigen::MatrixXf single(dim, frames * field.grid.size());
  in.bytes(single.data(), static_cast<std::size_t>(single.size()) * sizeof(float));
  field.values = single.cast<double>();
  return field;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureField& field) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::NotFound, "cannot write " + path.string());
  out << "frame,row,col";
  for (Eigen::Index k = 0; k < field.dim(); ++k) out << ",f" << k;
  out << '\n' << std::setprecision(9);
  for (Eigen::Index t = 0; t < field.frame_count(); ++t)
    for (Eigen::Index r = 0; r < field.grid.rows; ++r)
      for (Eigen::Index c = 0; c < field.grid.cols; ++c) {
        out << field.frame_indices[static_cast<std::size_t>(t)] << ',' << r << ',' << c;
        const auto x = field.feature(t, r, c);
        for (Eigen::Index k = 0; k < x.size(); ++k) out << ',' << static_cast<float>(x(k));
        out << '\n';
      }
}

}  // namespace vsl
