#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "vsl/detector.hpp"
#include "vsl/error.hpp"
#include "vsl/frame_io.hpp"

namespace vsl {

/// Pixel-level rates over covered pixels. A rate whose denominator is zero
/// (no positives, or no negatives) is nullopt.
struct PixelRates {
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t true_negatives = 0;
  std::int64_t false_negatives = 0;
};

/// `coverage` marks the pixels that take part (non-zero = counted).
template <typename Coverage>
PixelRates pixel_rates(const DetectionMask& mask, const GroundTruthMask& gt,
                       const Eigen::ArrayBase<Coverage>& coverage) {
  const auto& pos = mask.positives;
  if (pos.rows() != gt.height() || pos.cols() != gt.width() || coverage.rows() != gt.height() ||
      coverage.cols() != gt.width())
    fail(ErrorCode::ShapeError, "detection mask, ground truth and coverage differ in size");
  PixelRates r;
  for (Eigen::Index i = 0; i < pos.rows(); ++i)
    for (Eigen::Index j = 0; j < pos.cols(); ++j) {
      if (coverage(i, j) == 0) continue;
      const bool predicted = pos(i, j) != 0;
      const bool forged = gt.labels(i, j) != 0;
      if (forged) {
        ++(predicted ? r.true_positives : r.false_negatives);
      } else {
        ++(predicted ? r.false_positives : r.true_negatives);
      }
    }
  if (r.true_positives + r.false_negatives > 0)
    r.tpr = static_cast<double>(r.true_positives) /
            static_cast<double>(r.true_positives + r.false_negatives);
  if (r.false_positives + r.true_negatives > 0)
    r.fpr = static_cast<double>(r.false_positives) /
            static_cast<double>(r.false_positives + r.true_negatives);
  return r;
}
PixelRates pixel_rates(const DetectionMask& mask, const GroundTruthMask& gt, const HeatMap& heatmap);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocCurve {
  /// Ordered by decreasing threshold, from (0, 0) at +inf to (1, 1) at -inf.
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Heat maps and ground truth of one video, frame by frame.
struct VideoResult {
  std::vector<HeatMap> heatmaps;
  std::vector<GroundTruthMask> ground_truth;
};

/// Sweeps thresholds over the pooled covered scores of all videos. When
/// there are at most n_thresholds distinct scores every one is used,
/// otherwise n_thresholds nearest-rank quantiles; +inf and -inf close the
/// curve. Rates are computed per video and averaged across videos at each
/// threshold; AUC is the trapezoidal area of the averaged curve.
RocCurve roc_curve(const std::vector<VideoResult>& videos, int n_thresholds = 200);

/// Trapezoidal area under (fpr, tpr), clamped to [0, 1].
double auc(const RocCurve& curve);
double auc(const std::vector<RocPoint>& points);

/// CSV with header threshold,fpr,tpr.
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);
void write_roc_svg(const std::filesystem::path& path, const RocCurve& curve,
                   const std::string& title = "ROC");

}  // namespace vsl
