#include "vsl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace vsl {

PixelRates pixel_rates(const DetectionMask& mask, const GroundTruthMask& gt, const HeatMap& heatmap) {
  return pixel_rates(mask, gt, heatmap.coverage);
}

namespace {

struct VideoScores {
  std::vector<double> positives;  // sorted ascending
  std::vector<double> negatives;  // sorted ascending
};

VideoScores collect(const VideoResult& video) {
  if (video.heatmaps.size() != video.ground_truth.size())
    fail(ErrorCode::ShapeError, "heat map and ground-truth frame counts differ");
  VideoScores out;
  for (std::size_t f = 0; f < video.heatmaps.size(); ++f) {
    const auto& heat = video.heatmaps[f];
    const auto& gt = video.ground_truth[f];
    if (heat.height() != gt.height() || heat.width() != gt.width())
      fail(ErrorCode::ShapeError, "heat map and ground truth differ in size");
    for (Eigen::Index r = 0; r < heat.height(); ++r)
      for (Eigen::Index c = 0; c < heat.width(); ++c) {
        if (!heat.covered(r, c)) continue;
        (gt.labels(r, c) ? out.positives : out.negatives).push_back(heat.values(r, c));
      }
  }
  std::sort(out.positives.begin(), out.positives.end());
  std::sort(out.negatives.begin(), out.negatives.end());
  return out;
}

std::size_t count_above(const std::vector<double>& sorted, double threshold) {
  return static_cast<std::size_t>(sorted.end() -
                                  std::upper_bound(sorted.begin(), sorted.end(), threshold));
}

std::vector<double> sweep_thresholds(const std::vector<VideoScores>& videos, int n_thresholds) {
  std::vector<double> pooled;
  for (const auto& v : videos) {
    pooled.insert(pooled.end(), v.positives.begin(), v.positives.end());
    pooled.insert(pooled.end(), v.negatives.begin(), v.negatives.end());
  }
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> distinct = pooled;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> thresholds;
  if (distinct.size() <= static_cast<std::size_t>(n_thresholds)) {
    thresholds = distinct;
  } else {
    const auto last = static_cast<double>(pooled.size() - 1);
    for (int k = 0; k < n_thresholds; ++k) {
      const auto rank = static_cast<std::size_t>(std::llround(last * k / (n_thresholds - 1)));
      thresholds.push_back(pooled[rank]);
    }
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  }
  std::reverse(thresholds.begin(), thresholds.end());
  thresholds.insert(thresholds.begin(), std::numeric_limits<double>::infinity());
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  return thresholds;
}

}  // namespace

RocCurve roc_curve(const std::vector<VideoResult>& videos, int n_thresholds) {
  if (n_thresholds < 2) fail(ErrorCode::InvalidParameter, "n_thresholds must be >= 2");
  if (videos.empty()) fail(ErrorCode::InvalidParameter, "no videos to evaluate");

  std::vector<VideoScores> scores;
  std::size_t total_pos = 0;
  std::size_t total_neg = 0;
  for (const auto& v : videos) {
    if (v.heatmaps.empty()) fail(ErrorCode::InvalidParameter, "video without frames");
    scores.push_back(collect(v));
    total_pos += scores.back().positives.size();
    total_neg += scores.back().negatives.size();
  }
  if (total_pos == 0 || total_neg == 0)
    fail(ErrorCode::DegenerateGroundTruth,
         "covered pixels must include both forged and pristine labels");

  RocCurve curve;
  for (double threshold : sweep_thresholds(scores, n_thresholds)) {
    double tpr_sum = 0.0;
    double fpr_sum = 0.0;
    int tpr_n = 0;
    int fpr_n = 0;
    for (const auto& v : scores) {
      if (!v.positives.empty()) {
        tpr_sum += static_cast<double>(count_above(v.positives, threshold)) /
                   static_cast<double>(v.positives.size());
        ++tpr_n;
      }
      if (!v.negatives.empty()) {
        fpr_sum += static_cast<double>(count_above(v.negatives, threshold)) /
                   static_cast<double>(v.negatives.size());
        ++fpr_n;
      }
    }
    const RocPoint point{threshold, fpr_sum / fpr_n, tpr_sum / tpr_n};
    // Thresholds that do not move the operating point add nothing to the curve.
    if (!curve.points.empty() && curve.points.back().fpr == point.fpr &&
        curve.points.back().tpr == point.tpr && std::isfinite(threshold))
      continue;
    curve.points.push_back(point);
  }
  curve.auc = auc(curve.points);
  return curve;
}

double auc(const std::vector<RocPoint>& points) {
  if (points.size() < 2) fail(ErrorCode::InvalidParameter, "an ROC curve needs at least 2 points");
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k)
    area += (points[k].fpr - points[k - 1].fpr) * (points[k].tpr + points[k - 1].tpr) / 2.0;
  return std::clamp(area, 0.0, 1.0);
}

double auc(const RocCurve& curve) { return auc(curve.points); }

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::NotFound, "cannot write " + path.string());
  out << "threshold,fpr,tpr\n" << std::setprecision(17);
  for (const auto& p : curve.points) out << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
}

void write_roc_svg(const std::filesystem::path& path, const RocCurve& curve,
                   const std::string& title) {
  constexpr double kSize = 400.0;
  constexpr double kMargin = 50.0;
  std::ofstream out(path);
  if (!out) fail(ErrorCode::NotFound, "cannot write " + path.string());
  auto x = [&](double fpr) { return kMargin + fpr * kSize; };
  auto y = [&](double tpr) { return kMargin + (1.0 - tpr) * kSize; };
  const double full = kSize + 2 * kMargin;
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << full << "\" height=\"" << full
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" fill=\"white\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << x(0) << "\" y1=\"" << y(0) << "\" x2=\"" << x(1) << "\" y2=\"" << y(1)
      << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
  for (const auto& p : curve.points) out << x(p.fpr) << ',' << y(p.tpr) << ' ';
  out << "\"/>\n";
  out << "<text x=\"" << full / 2 << "\" y=\"" << kMargin / 2 << "\" text-anchor=\"middle\">"
      << title << " (AUC " << std::setprecision(4) << curve.auc << ")</text>\n";
  out << std::setprecision(2);
  out << "<text x=\"" << full / 2 << "\" y=\"" << full - 15 << "\" text-anchor=\"middle\">FPR</text>\n";
  out << "<text x=\"15\" y=\"" << full / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << full / 2 << ")\">TPR</text>\n";
  out << "</svg>\n";
}

}  // namespace vsl
