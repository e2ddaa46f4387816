#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "vsl/features.hpp"
#include "vsl/frame_io.hpp"
#include "vsl/neural/checkpoint.hpp"

namespace vsl {

/// Reconstruction error of every patch in one frame (grid.rows x grid.cols).
using ScoreGrid = Eigen::ArrayXXd;

/// Per-pixel anomaly score and the number of patches covering each pixel.
/// Pixels with coverage 0 are outside every patch and carry value 0; they
/// must be excluded through the coverage raster, never read as scores.
struct HeatMap {
  Eigen::ArrayXXd values;                                  // height x width
  Eigen::Array<std::int32_t, Eigen::Dynamic, Eigen::Dynamic> coverage;  // height x width
  long frame_index = 0;

  Eigen::Index height() const { return values.rows(); }
  Eigen::Index width() const { return values.cols(); }
  bool covered(Eigen::Index r, Eigen::Index c) const { return coverage(r, c) > 0; }
};

struct DetectionMask {
  LabelRaster positives;
  double threshold = 0.0;
};

/// Minibatch size used unless configured: feature vectors for feedforward
/// models, sequences for recurrent ones.
constexpr int default_batch_size(neural::ModelKind kind) {
  return kind == neural::ModelKind::Feedforward ? 128 : 64;
}

struct DetectorConfig {
  neural::ModelKind kind = neural::ModelKind::Feedforward;
  Eigen::Index hidden_dim = 100;
  neural::TrainConfig training;
  neural::AdamHyper adam;
};

/// Per-location feature sequences of a field (K x frames each), cut into
/// consecutive windows of `unroll_length` frames.
std::vector<Eigen::MatrixXd> location_windows(const FeatureField& features,
                                              Eigen::Index unroll_length);

/// Learns the intrinsic model from features of pristine frames.
neural::Checkpoint fit_detector(const FeatureField& pristine, const DetectorConfig& config);

/// Scores and aggregates every frame of `features` into heat maps.
std::vector<HeatMap> detect(const neural::Checkpoint& checkpoint, const FeatureField& features,
                            int workers = 1);

/// Scores every patch of every frame. Feedforward models score each feature
/// independently; recurrent models run each location's features through
/// consecutive unroll-length windows starting from the zero state, the last
/// window at its natural length. Returns one grid per frame.
std::vector<ScoreGrid> score_patches(const neural::AnyModel& model, const FeatureField& features,
                                     int workers = 1);

/// Mean score of the patches covering each pixel.
HeatMap aggregate_heatmap(const ScoreGrid& scores, Eigen::Index frame_height,
                          Eigen::Index frame_width, const PatchGeometry& geometry);

/// Positive iff covered and value > threshold.
DetectionMask threshold_map(const HeatMap& heatmap, double threshold);

/// Float heat map file, little-endian:
///   magic "VSLHEATM", u32 version 1, i64 frame_index, i64 height, i64 width,
///   height*width f32 values (row-major), height*width i32 coverage counts.
void write_heatmap(const std::filesystem::path& path, const HeatMap& heatmap);
HeatMap read_heatmap(const std::filesystem::path& path);

/// 8-bit rendering, min-max normalized over covered pixels; uncovered pixels are 0.
LumaRaster render_heatmap(const HeatMap& heatmap);

void write_mask_pgm(const std::filesystem::path& path, const LabelRaster& labels);

}  // namespace vsl
