#pragma once

#include <filesystem>

#include "vsl/features.hpp"

namespace vsl {

/// Binary feature file, little-endian:
///
///   magic        8 bytes  "VSLFEATS"
///   version      u32      1
///   symmetry     u32      0 none, 1 sign, 2 reversal, 3 sign+reversal
///   q            f64
///   T            i32
///   patch, stride, frame_height, frame_width, grid_rows, grid_cols,
///   dim, frame_count                                   i64 each
///   frame_indices  frame_count x i64
///   features     frame_count * grid_rows * grid_cols records of dim x f32,
///                ordered by frame, grid row, grid column
///
/// Values are stored in single precision; reading widens them to double.
inline constexpr std::uint32_t kFeatureFileVersion = 1;

void write_feature_field(const std::filesystem::path& path, const FeatureField& field);
FeatureField read_feature_field(const std::filesystem::path& path);

/// One line per patch: frame,row,col,f0,...,f{dim-1}.
void write_feature_csv(const std::filesystem::path& path, const FeatureField& field);

}  // namespace vsl
