#include "vsl/detector.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "vsl/error.hpp"
#include "vsl/parallel.hpp"

namespace vsl {

namespace {

// Locations scored together in one recurrent batch. Fixed so that results do
// not depend on the worker count.
constexpr Eigen::Index kLocationChunk = 64;

std::vector<ScoreGrid> empty_grids(const FeatureField& features) {
  return std::vector<ScoreGrid>(static_cast<std::size_t>(features.frame_count()),
                                ScoreGrid::Zero(features.grid.rows, features.grid.cols));
}

std::vector<ScoreGrid> score_feedforward(const neural::DenseAutoencoderd& model,
                                         const FeatureField& features, int workers) {
  auto grids = empty_grids(features);
  const Eigen::Index locations = features.grid.size();
  parallel_for(grids.size(), workers, [&](std::size_t t) {
    const auto losses = model.column_losses(
        features.values.middleCols(static_cast<Eigen::Index>(t) * locations, locations));
    for (Eigen::Index s = 0; s < locations; ++s)
      grids[t](s / features.grid.cols, s % features.grid.cols) = losses(s);
  });
  return grids;
}

std::vector<ScoreGrid> score_recurrent(const neural::LstmAutoencoderd& model,
                                       const FeatureField& features, int workers) {
  auto grids = empty_grids(features);
  const Eigen::Index locations = features.grid.size();
  const Eigen::Index frames = features.frame_count();
  const Eigen::Index window = model.unroll_length();
  const Eigen::Index chunks = (locations + kLocationChunk - 1) / kLocationChunk;

  parallel_for(static_cast<std::size_t>(chunks), workers, [&](std::size_t chunk) {
    const Eigen::Index first = static_cast<Eigen::Index>(chunk) * kLocationChunk;
    const Eigen::Index count = std::min(kLocationChunk, locations - first);
    for (Eigen::Index t0 = 0; t0 < frames; t0 += window) {
      const Eigen::Index length = std::min(window, frames - t0);
      neural::LstmAutoencoderd::Steps steps(static_cast<std::size_t>(length));
      for (Eigen::Index k = 0; k < length; ++k)
        steps[static_cast<std::size_t>(k)] =
            features.values.middleCols((t0 + k) * locations + first, count);
      const auto recon = model.forward(steps);
      for (Eigen::Index k = 0; k < length; ++k) {
        const auto& x = steps[static_cast<std::size_t>(k)];
        const Eigen::VectorXd losses =
            (x - recon[static_cast<std::size_t>(k)]).colwise().squaredNorm().transpose() /
            static_cast<double>(x.rows());
        for (Eigen::Index j = 0; j < count; ++j) {
          const Eigen::Index s = first + j;
          grids[static_cast<std::size_t>(t0 + k)](s / features.grid.cols, s % features.grid.cols) =
              losses(j);
        }
      }
    }
  });
  return grids;
}

// Inclusive range [lo, hi] of patch indices along one axis whose footprint
// [i * stride, i * stride + patch) contains pixel p; empty when lo > hi.
std::pair<Eigen::Index, Eigen::Index> covering_range(Eigen::Index p, Eigen::Index count,
                                                     const PatchGeometry& g) {
  const Eigen::Index hi = std::min(count - 1, p / g.stride);
  const Eigen::Index reach = p - g.patch + 1;
  const Eigen::Index lo = reach <= 0 ? 0 : (reach + g.stride - 1) / g.stride;
  return {lo, hi};
}

// Maximal runs of consecutive pixels sharing the same covering range.
struct Run {
  Eigen::Index begin, end, lo, hi;
};

std::vector<Run> covering_runs(Eigen::Index extent, Eigen::Index count, const PatchGeometry& g) {
  std::vector<Run> runs;
  for (Eigen::Index p = 0; p < extent; ++p) {
    const auto [lo, hi] = covering_range(p, count, g);
    if (!runs.empty() && runs.back().lo == lo && runs.back().hi == hi) {
      runs.back().end = p + 1;
    } else {
      runs.push_back({p, p + 1, lo, hi});
    }
  }
  return runs;
}

constexpr char kHeatMagic[9] = "VSLHEATM";
constexpr std::uint32_t kHeatVersion = 1;

}  // namespace

std::vector<ScoreGrid> score_patches(const neural::AnyModel& model, const FeatureField& features,
                                     int workers) {
  if (features.dim() != neural::input_dim_of(model))
    fail(ErrorCode::ShapeError, "feature dimension " + std::to_string(features.dim()) +
                                    " does not match model dimension " +
                                    std::to_string(neural::input_dim_of(model)));
  if (const auto* dense = std::get_if<neural::DenseAutoencoderd>(&model))
    return score_feedforward(*dense, features, workers);
  return score_recurrent(std::get<neural::LstmAutoencoderd>(model), features, workers);
}

HeatMap aggregate_heatmap(const ScoreGrid& scores, Eigen::Index frame_height,
                          Eigen::Index frame_width, const PatchGeometry& geometry) {
  if (grid_shape(frame_height, frame_width, geometry) != GridShape{scores.rows(), scores.cols()})
    fail(ErrorCode::ShapeError, "score grid does not match frame geometry");

  HeatMap heat;
  heat.values = Eigen::ArrayXXd::Zero(frame_height, frame_width);
  heat.coverage.setZero(frame_height, frame_width);
  const auto row_runs = covering_runs(frame_height, scores.rows(), geometry);
  const auto col_runs = covering_runs(frame_width, scores.cols(), geometry);
  for (const auto& rr : row_runs) {
    if (rr.lo > rr.hi) continue;
    for (const auto& cr : col_runs) {
      if (cr.lo > cr.hi) continue;
      double sum = 0.0;
      for (Eigen::Index r = rr.lo; r <= rr.hi; ++r)
        for (Eigen::Index c = cr.lo; c <= cr.hi; ++c) sum += scores(r, c);
      const auto count = static_cast<std::int32_t>((rr.hi - rr.lo + 1) * (cr.hi - cr.lo + 1));
      heat.values.block(rr.begin, cr.begin, rr.end - rr.begin, cr.end - cr.begin) = sum / count;
      heat.coverage.block(rr.begin, cr.begin, rr.end - rr.begin, cr.end - cr.begin) = count;
    }
  }
  return heat;
}

DetectionMask threshold_map(const HeatMap& heatmap, double threshold) {
  DetectionMask mask;
  mask.threshold = threshold;
  mask.positives = ((heatmap.coverage > 0) && (heatmap.values > threshold)).cast<std::uint8_t>();
  return mask;
}

void write_heatmap(const std::filesystem::path& path, const HeatMap& heatmap) {
  detail::BinaryWriter out(path);
  out.bytes(kHeatMagic, 8);
  out.put<std::uint32_t>(kHeatVersion);
  out.put<std::int64_t>(heatmap.frame_index);
  out.put<std::int64_t>(heatmap.height());
  out.put<std::int64_t>(heatmap.width());
  using RowMajorF = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using RowMajorI = Eigen::Array<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajorF values = heatmap.values.cast<float>();
  const RowMajorI coverage = heatmap.coverage;
  out.bytes(values.data(), static_cast<std::size_t>(values.size()) * sizeof(float));
  out.bytes(coverage.data(), static_cast<std::size_t>(coverage.size()) * sizeof(std::int32_t));
  out.finish();
}

HeatMap read_heatmap(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kHeatMagic);
  if (in.get<std::uint32_t>() != kHeatVersion)
    fail(ErrorCode::UnsupportedFormat, in.path() + ": unsupported heat map version");
  HeatMap heat;
  heat.frame_index = in.get<std::int64_t>();
  const auto height = in.get<std::int64_t>();
  const auto width = in.get<std::int64_t>();
  if (height <= 0 || width <= 0) fail(ErrorCode::UnsupportedFormat, in.path() + ": bad size");
  Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values(height, width);
  Eigen::Array<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> coverage(height, width);
  in.bytes(values.data(), static_cast<std::size_t>(values.size()) * sizeof(float));
  in.bytes(coverage.data(), static_cast<std::size_t>(coverage.size()) * sizeof(std::int32_t));
  heat.values = values.cast<double>();
  heat.coverage = coverage;
  return heat;
}

LumaRaster render_heatmap(const HeatMap& heatmap) {
  LumaRaster out = LumaRaster::Zero(heatmap.height(), heatmap.width());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index r = 0; r < heatmap.height(); ++r)
    for (Eigen::Index c = 0; c < heatmap.width(); ++c)
      if (heatmap.covered(r, c)) {
        lo = std::min(lo, heatmap.values(r, c));
        hi = std::max(hi, heatmap.values(r, c));
      }
  if (!(hi > lo)) return out;
  for (Eigen::Index r = 0; r < heatmap.height(); ++r)
    for (Eigen::Index c = 0; c < heatmap.width(); ++c)
      if (heatmap.covered(r, c))
        out(r, c) = static_cast<std::uint8_t>(
            std::lround(255.0 * (heatmap.values(r, c) - lo) / (hi - lo)));
  return out;
}

void write_mask_pgm(const std::filesystem::path& path, const LabelRaster& labels) {
  write_pgm(path, (labels > std::uint8_t{0}).select(LumaRaster::Constant(labels.rows(), labels.cols(), 255),
                                                    LumaRaster::Zero(labels.rows(), labels.cols())));
}

}  // namespace vsl

namespace vsl {

std::vector<Eigen::MatrixXd> location_windows(const FeatureField& features,
                                              Eigen::Index unroll_length) {
  const Eigen::Index locations = features.grid.size();
  std::vector<Eigen::MatrixXd> windows;
  Eigen::MatrixXd sequence(features.dim(), features.frame_count());
  for (Eigen::Index s = 0; s < locations; ++s) {
    for (Eigen::Index t = 0; t < features.frame_count(); ++t)
      sequence.col(t) = features.values.col(t * locations + s);
    for (auto& w : neural::split_windows(sequence, unroll_length)) windows.push_back(std::move(w));
  }
  return windows;
}

neural::Checkpoint fit_detector(const FeatureField& pristine, const DetectorConfig& config) {
  if (pristine.values.cols() == 0) fail(ErrorCode::InvalidParameter, "no pristine features");
  neural::Checkpoint cp;
  cp.features = pristine.config;
  cp.training = config.training;
  cp.adam = config.adam;
  cp.training_frames = pristine.frame_indices;
  if (config.kind == neural::ModelKind::Feedforward) {
    auto init = neural::make_dense_autoencoder(pristine.dim(), config.hidden_dim, config.training);
    auto result = neural::train(std::move(init), pristine.values, config.training, config.adam);
    cp.model = std::move(result.model);
    cp.epoch_losses = std::move(result.epoch_losses);
  } else {
    auto init = neural::make_lstm_autoencoder(pristine.dim(), config.hidden_dim, config.training);
    auto result = neural::train(std::move(init),
                                location_windows(pristine, config.training.unroll_length),
                                config.training, config.adam);
    cp.model = std::move(result.model);
    cp.epoch_losses = std::move(result.epoch_losses);
  }
  return cp;
}

std::vector<HeatMap> detect(const neural::Checkpoint& checkpoint, const FeatureField& features,
                            int workers) {
  const auto& fc = checkpoint.features;
  if (fc.symmetry != features.config.symmetry ||
      fc.quantizer.truncation != features.config.quantizer.truncation ||
      fc.quantizer.step != features.config.quantizer.step ||
      fc.geometry.patch != features.config.geometry.patch ||
      fc.geometry.stride != features.config.geometry.stride)
    fail(ErrorCode::ShapeError, "features were extracted with a different configuration");
  const auto grids = score_patches(checkpoint.model, features, workers);
  std::vector<HeatMap> maps(grids.size());
  parallel_for(grids.size(), workers, [&](std::size_t t) {
    maps[t] = aggregate_heatmap(grids[t], features.frame_height, features.frame_width,
                                features.config.geometry);
    maps[t].frame_index = features.frame_indices[t];
  });
  return maps;
}

}  // namespace vsl
