#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vsl/frame_io.hpp"

namespace vsl {

using IntRaster = Eigen::Array<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Orientation { Horizontal, Vertical };
enum class TupleDirection { AlongRows, AlongColumns };
enum class Symmetry { None, Sign, Reversal, SignReversal };

std::string_view to_string(Symmetry symmetry);
Symmetry parse_symmetry(std::string_view name);

/// Third-order derivative residual on the valid region (no padding).
/// Horizontal: height x (width - 3), value(i, j) uses frame columns j..j+3.
/// Vertical: (height - 3) x width, value(i, j) uses frame rows i..i+3.
using ResidualMap = IntRaster;
/// Quantized residual with entries in [-T, T].
using QuantizedResidual = IntRaster;

ResidualMap compute_residual(const Frame& frame, Orientation orientation);

struct Quantizer {
  double step = 3.0;     // q
  int truncation = 2;    // T

  int levels() const { return 2 * truncation + 1; }
  /// Number of bins of a 4-tuple co-occurrence histogram, (2T+1)^4.
  int bins() const { return levels() * levels() * levels() * levels(); }
};

/// trunc_T(round(r / q)) with half-away-from-zero rounding.
std::int32_t quantize_value(std::int32_t residual, const Quantizer& quantizer);
QuantizedResidual quantize_truncate(const ResidualMap& residual, const Quantizer& quantizer);

/// Half-open rectangle [row, row + height) x [col, col + width).
struct Region {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  Eigen::Index height = 0;
  Eigen::Index width = 0;
};

using RawHistogram = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Tuple (k0, k1, k2, k3) with entries in [-T, T] maps to bin
/// sum_m (k_m + T) * L^(3 - m), L = 2T + 1.
int tuple_bin(const std::array<int, 4>& tuple, int truncation);
std::array<int, 4> bin_tuple(int bin, int truncation);

/// Counts every aligned 4-tuple of unit stride inside `region`.
RawHistogram cooccurrence_histogram(const QuantizedResidual& qres, const Region& region,
                                    TupleDirection direction, int truncation);

/// Partition of the histogram bins into orbits of a symmetry group acting on
/// 4-tuples. Orbits are numbered in order of their smallest bin.
class SymmetryMerger {
 public:
  SymmetryMerger(Symmetry symmetry, int truncation);

  Symmetry symmetry() const { return symmetry_; }
  int truncation() const { return truncation_; }
  int input_dim() const { return static_cast<int>(orbit_of_.size()); }
  int output_dim() const { return orbit_count_; }
  int orbit_of(int bin) const { return orbit_of_[static_cast<std::size_t>(bin)]; }

  /// Sums row and column histograms, then sums bins over each orbit.
  Eigen::VectorXd merge(const RawHistogram& row_hist, const RawHistogram& col_hist) const;
  /// Orbit sums of an already pooled histogram.
  Eigen::VectorXd merge_pooled(const RawHistogram& pooled) const;

 private:
  Symmetry symmetry_;
  int truncation_;
  int orbit_count_ = 0;
  std::vector<int> orbit_of_;
};

/// Subtracts the mean and scales to unit L2 norm. Vectors whose centered
/// norm is below 1e-12 map to all zeros.
Eigen::VectorXd normalize_feature(const Eigen::VectorXd& merged);

struct PatchGeometry {
  Eigen::Index patch = 128;
  Eigen::Index stride = 8;
};

struct GridShape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index size() const { return rows * cols; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// floor((extent - patch) / stride) + 1 along each axis.
GridShape grid_shape(Eigen::Index height, Eigen::Index width, const PatchGeometry& geometry);

struct FeatureConfig {
  PatchGeometry geometry;
  Quantizer quantizer;
  Symmetry symmetry = Symmetry::SignReversal;
};

/// Per-patch features over a sequence of frames. Column
/// (t * grid.rows + r) * grid.cols + c holds the feature of the patch with
/// top-left pixel (r * stride, c * stride) in frame t.
struct FeatureField {
  FeatureConfig config;
  Eigen::Index frame_height = 0;
  Eigen::Index frame_width = 0;
  GridShape grid;
  std::vector<long> frame_indices;
  Eigen::MatrixXd values;  // dim x (frames * grid.size())

  Eigen::Index dim() const { return values.rows(); }
  Eigen::Index frame_count() const { return static_cast<Eigen::Index>(frame_indices.size()); }
  Eigen::Index column(Eigen::Index t, Eigen::Index r, Eigen::Index c) const {
    return (t * grid.rows + r) * grid.cols + c;
  }
  auto feature(Eigen::Index t, Eigen::Index r, Eigen::Index c) const {
    return values.col(column(t, r, c));
  }
  /// The (frames * grid.size()) columns of frames [first, first + count).
  FeatureField slice_frames(Eigen::Index first, Eigen::Index count) const;
};

/// Features of every grid location in one frame, as columns in raster order.
Eigen::MatrixXd extract_patch_features(const Frame& frame, const FeatureConfig& config,
                                       const SymmetryMerger& merger);
Eigen::MatrixXd extract_patch_features(const Frame& frame, const FeatureConfig& config);

FeatureField extract_feature_field(const FrameSequence& sequence, const FeatureConfig& config,
                                   int workers = 1);

}  // namespace vsl
