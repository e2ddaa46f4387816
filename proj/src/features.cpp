#include "vsl/features.hpp"

#include <cmath>

#include "vsl/error.hpp"
#include "vsl/parallel.hpp"

namespace vsl {

std::string_view to_string(Symmetry symmetry) {
  switch (symmetry) {
    case Symmetry::None: return "none";
    case Symmetry::Sign: return "sign";
    case Symmetry::Reversal: return "reversal";
    case Symmetry::SignReversal: return "sign+reversal";
  }
  return "none";
}

Symmetry parse_symmetry(std::string_view name) {
  for (auto s : {Symmetry::None, Symmetry::Sign, Symmetry::Reversal, Symmetry::SignReversal})
    if (name == to_string(s)) return s;
  fail(ErrorCode::InvalidParameter, "unknown symmetry '" + std::string(name) + "'");
}

ResidualMap compute_residual(const Frame& frame, Orientation orientation) {
  const Eigen::Index h = frame.height();
  const Eigen::Index w = frame.width();
  const auto f = frame.luma.cast<std::int32_t>();
  if (orientation == Orientation::Horizontal) {
    if (w < 4) fail(ErrorCode::PatchTooSmall, "horizontal residual needs width >= 4");
    const Eigen::Index n = w - 3;
    return f.middleCols(0, n) - 3 * f.middleCols(1, n) + 3 * f.middleCols(2, n) -
           f.middleCols(3, n);
  }
  if (h < 4) fail(ErrorCode::PatchTooSmall, "vertical residual needs height >= 4");
  const Eigen::Index n = h - 3;
  return f.middleRows(0, n) - 3 * f.middleRows(1, n) + 3 * f.middleRows(2, n) - f.middleRows(3, n);
}

std::int32_t quantize_value(std::int32_t residual, const Quantizer& quantizer) {
  // std::round rounds halves away from zero, so quantization is odd-symmetric.
  const double q = std::round(static_cast<double>(residual) / quantizer.step);
  const double t = quantizer.truncation;
  return static_cast<std::int32_t>(std::clamp(q, -t, t));
}

QuantizedResidual quantize_truncate(const ResidualMap& residual, const Quantizer& quantizer) {
  if (!(quantizer.step > 0.0) || !std::isfinite(quantizer.step))
    fail(ErrorCode::InvalidParameter, "quantization step must be positive");
  if (quantizer.truncation < 1) fail(ErrorCode::InvalidParameter, "truncation level must be >= 1");
  return residual.unaryExpr([&](std::int32_t r) { return quantize_value(r, quantizer); });
}

int tuple_bin(const std::array<int, 4>& tuple, int truncation) {
  const int levels = 2 * truncation + 1;
  int bin = 0;
  for (int k : tuple) bin = bin * levels + (k + truncation);
  return bin;
}

std::array<int, 4> bin_tuple(int bin, int truncation) {
  const int levels = 2 * truncation + 1;
  std::array<int, 4> tuple{};
  for (int m = 3; m >= 0; --m) {
    tuple[static_cast<std::size_t>(m)] = bin % levels - truncation;
    bin /= levels;
  }
  return tuple;
}

RawHistogram cooccurrence_histogram(const QuantizedResidual& qres, const Region& region,
                                    TupleDirection direction, int truncation) {
  if (region.row < 0 || region.col < 0 || region.height < 0 || region.width < 0 ||
      region.row + region.height > qres.rows() || region.col + region.width > qres.cols())
    fail(ErrorCode::RegionOutOfBounds, "histogram region exceeds the residual map");
  const bool along_rows = direction == TupleDirection::AlongRows;
  if ((along_rows ? region.width : region.height) < 4 || (along_rows ? region.height : region.width) < 1)
    fail(ErrorCode::RegionOutOfBounds, "region admits no 4-tuple in the requested direction");

  const int levels = 2 * truncation + 1;
  RawHistogram counts = RawHistogram::Zero(levels * levels * levels * levels);
  const Eigen::Index di = along_rows ? 0 : 1;
  const Eigen::Index dj = along_rows ? 1 : 0;
  const Eigen::Index rows = region.height - 3 * di;
  const Eigen::Index cols = region.width - 3 * dj;
  for (Eigen::Index i = region.row; i < region.row + rows; ++i) {
    for (Eigen::Index j = region.col; j < region.col + cols; ++j) {
      int bin = 0;
      for (Eigen::Index m = 0; m < 4; ++m) {
        const int k = qres(i + m * di, j + m * dj);
        if (k < -truncation || k > truncation)
          fail(ErrorCode::InvalidParameter, "quantized residual outside [-T, T]");
        bin = bin * levels + (k + truncation);
      }
      ++counts(bin);
    }
  }
  return counts;
}

SymmetryMerger::SymmetryMerger(Symmetry symmetry, int truncation)
    : symmetry_(symmetry), truncation_(truncation) {
  if (truncation < 1) fail(ErrorCode::InvalidParameter, "truncation level must be >= 1");
  const bool sign = symmetry == Symmetry::Sign || symmetry == Symmetry::SignReversal;
  const bool reversal = symmetry == Symmetry::Reversal || symmetry == Symmetry::SignReversal;
  const int levels = 2 * truncation + 1;
  const int bins = levels * levels * levels * levels;

  orbit_of_.assign(static_cast<std::size_t>(bins), -1);
  for (int bin = 0; bin < bins; ++bin) {
    if (orbit_of_[static_cast<std::size_t>(bin)] >= 0) continue;
    // The groups here are generated by commuting involutions, so the orbit is
    // the image of the tuple under every combination of generators.
    const auto t = bin_tuple(bin, truncation);
    std::vector<std::array<int, 4>> images{t};
    if (sign) images.push_back({-t[0], -t[1], -t[2], -t[3]});
    if (reversal) {
      const std::size_t n = images.size();
      for (std::size_t k = 0; k < n; ++k) {
        const auto& u = images[k];
        images.push_back({u[3], u[2], u[1], u[0]});
      }
    }
    for (const auto& u : images) orbit_of_[static_cast<std::size_t>(tuple_bin(u, truncation))] = orbit_count_;
    ++orbit_count_;
  }
}

Eigen::VectorXd SymmetryMerger::merge(const RawHistogram& row_hist,
                                      const RawHistogram& col_hist) const {
  if (row_hist.size() != input_dim() || col_hist.size() != input_dim())
    fail(ErrorCode::InvalidParameter, "histogram length does not match the quantizer");
  return merge_pooled(row_hist + col_hist);
}

Eigen::VectorXd SymmetryMerger::merge_pooled(const RawHistogram& pooled) const {
  if (pooled.size() != input_dim())
    fail(ErrorCode::InvalidParameter, "histogram length does not match the quantizer");
  Eigen::VectorXd merged = Eigen::VectorXd::Zero(orbit_count_);
  for (Eigen::Index bin = 0; bin < pooled.size(); ++bin)
    merged(orbit_of_[static_cast<std::size_t>(bin)]) += static_cast<double>(pooled(bin));
  return merged;
}

Eigen::VectorXd normalize_feature(const Eigen::VectorXd& merged) {
  if (merged.size() == 0) fail(ErrorCode::InvalidParameter, "cannot normalize an empty vector");
  Eigen::VectorXd centered = merged.array() - merged.mean();
  const double norm = centered.norm();
  if (norm < 1e-12) return Eigen::VectorXd::Zero(merged.size());
  return centered / norm;
}

GridShape grid_shape(Eigen::Index height, Eigen::Index width, const PatchGeometry& geometry) {
  if (geometry.patch < 8) fail(ErrorCode::PatchTooSmall, "patch size must be >= 8");
  if (geometry.stride < 1) fail(ErrorCode::InvalidParameter, "stride must be >= 1");
  if (height < geometry.patch || width < geometry.patch)
    fail(ErrorCode::PatchTooSmall, "frame " + std::to_string(width) + "x" +
                                       std::to_string(height) + " is smaller than the patch");
  return {(height - geometry.patch) / geometry.stride + 1,
          (width - geometry.patch) / geometry.stride + 1};
}

FeatureField FeatureField::slice_frames(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 0 || first + count > frame_count())
    fail(ErrorCode::InvalidParameter, "frame slice out of range");
  FeatureField out;
  out.config = config;
  out.frame_height = frame_height;
  out.frame_width = frame_width;
  out.grid = grid;
  out.frame_indices.assign(frame_indices.begin() + first, frame_indices.begin() + first + count);
  out.values = values.middleCols(first * grid.size(), count * grid.size());
  return out;
}

namespace {

using CodeMap = Eigen::Array<std::int16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Bin of the tuple starting at every position where both residual
// orientations admit one. The horizontal residual pairs with tuples along
// columns, the vertical residual with tuples along rows; both maps are
// (height - 3) x (width - 3) and align with the frame's top-left corner.
struct TupleCodes {
  CodeMap from_horizontal;
  CodeMap from_vertical;
};

TupleCodes tuple_codes(const Frame& frame, const Quantizer& quantizer) {
  const auto qh = quantize_truncate(compute_residual(frame, Orientation::Horizontal), quantizer);
  const auto qv = quantize_truncate(compute_residual(frame, Orientation::Vertical), quantizer);
  const Eigen::Index rows = frame.height() - 3;
  const Eigen::Index cols = frame.width() - 3;
  const int levels = quantizer.levels();
  const int t = quantizer.truncation;
  TupleCodes codes{CodeMap(rows, cols), CodeMap(rows, cols)};
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      int h = 0;
      int v = 0;
      for (Eigen::Index m = 0; m < 4; ++m) {
        h = h * levels + (qh(i + m, j) + t);
        v = v * levels + (qv(i, j + m) + t);
      }
      codes.from_horizontal(i, j) = static_cast<std::int16_t>(h);
      codes.from_vertical(i, j) = static_cast<std::int16_t>(v);
    }
  }
  return codes;
}

void accumulate_columns(const TupleCodes& codes, Eigen::Index row0, Eigen::Index rows,
                        Eigen::Index col0, Eigen::Index cols, std::int64_t sign,
                        RawHistogram& hist) {
  for (Eigen::Index i = row0; i < row0 + rows; ++i) {
    for (Eigen::Index j = col0; j < col0 + cols; ++j) {
      hist(codes.from_horizontal(i, j)) += sign;
      hist(codes.from_vertical(i, j)) += sign;
    }
  }
}

void check_quantizer(const FeatureConfig& config, const SymmetryMerger& merger) {
  if (config.quantizer.bins() > 32767)
    fail(ErrorCode::InvalidParameter, "truncation level too large for tuple codes");
  if (merger.truncation() != config.quantizer.truncation || merger.symmetry() != config.symmetry)
    fail(ErrorCode::InvalidParameter, "symmetry merger does not match the feature config");
}

}  // namespace

Eigen::MatrixXd extract_patch_features(const Frame& frame, const FeatureConfig& config,
                                       const SymmetryMerger& merger) {
  check_quantizer(config, merger);
  const auto grid = grid_shape(frame.height(), frame.width(), config.geometry);
  const auto codes = tuple_codes(frame, config.quantizer);
  const Eigen::Index span = config.geometry.patch - 3;  // tuple starts per patch side
  const Eigen::Index stride = config.geometry.stride;

  Eigen::MatrixXd out(merger.output_dim(), grid.size());
  RawHistogram hist(config.quantizer.bins());
  for (Eigen::Index r = 0; r < grid.rows; ++r) {
    const Eigen::Index row0 = r * stride;
    for (Eigen::Index c = 0; c < grid.cols; ++c) {
      const Eigen::Index col0 = c * stride;
      if (c == 0 || stride >= span) {
        hist.setZero();
        accumulate_columns(codes, row0, span, col0, span, +1, hist);
      } else {
        accumulate_columns(codes, row0, span, col0 - stride, stride, -1, hist);
        accumulate_columns(codes, row0, span, col0 + span - stride, stride, +1, hist);
      }
      out.col(r * grid.cols + c) = normalize_feature(merger.merge_pooled(hist));
    }
  }
  return out;
}

Eigen::MatrixXd extract_patch_features(const Frame& frame, const FeatureConfig& config) {
  return extract_patch_features(frame, config,
                                SymmetryMerger(config.symmetry, config.quantizer.truncation));
}

FeatureField extract_feature_field(const FrameSequence& sequence, const FeatureConfig& config,
                                   int workers) {
  if (sequence.frames.empty()) fail(ErrorCode::InvalidParameter, "empty frame sequence");
  const SymmetryMerger merger(config.symmetry, config.quantizer.truncation);

  FeatureField field;
  field.config = config;
  field.frame_height = sequence.height();
  field.frame_width = sequence.width();
  field.grid = grid_shape(field.frame_height, field.frame_width, config.geometry);
  const auto frames = static_cast<Eigen::Index>(sequence.size());
  for (Eigen::Index t = 0; t < frames; ++t) field.frame_indices.push_back(sequence.frame_index_origin + t);
  field.values.resize(merger.output_dim(), frames * field.grid.size());

  parallel_for(sequence.size(), workers, [&](std::size_t t) {
    const auto& frame = sequence.frames[t];
    if (frame.height() != field.frame_height || frame.width() != field.frame_width)
      fail(ErrorCode::InconsistentDimensions, "frame dimensions differ within sequence");
    field.values.middleCols(static_cast<Eigen::Index>(t) * field.grid.size(), field.grid.size()) =
        extract_patch_features(frame, config, merger);
  });
  return field;
}

}  // namespace vsl
