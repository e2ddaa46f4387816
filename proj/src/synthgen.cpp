#include "vsl/synthgen.hpp"

#include <cmath>
#include <cstdlib>

#include "json.hpp"
#include "vsl/error.hpp"
#include "vsl/rng.hpp"

namespace vsl::synth {

Eigen::MatrixXd gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0) || radius < 0) fail(ErrorCode::InvalidParameter, "invalid Gaussian kernel");
  const int size = 2 * radius + 1;
  Eigen::MatrixXd k(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      const double di = i - radius;
      const double dj = j - radius;
      k(i, j) = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
    }
  return k / k.sum();
}

bool RegionTrajectory::active(long frame, long n_frames) const {
  const long last = last_frame < 0 ? n_frames - 1 : last_frame;
  return start.height > 0 && start.width > 0 && frame >= first_frame && frame <= last;
}

Region RegionTrajectory::at(long frame) const {
  const long dt = frame - first_frame;
  return {start.row + velocity_rows * dt, start.col + velocity_cols * dt, start.height,
          start.width};
}

namespace {

// Canvas large enough for every crop of the sequence, already smoothed and
// scaled to unit variance.
Eigen::MatrixXd smooth_canvas(const SourceModel& source, Eigen::Index rows, Eigen::Index cols) {
  const auto& k = source.kernel;
  if (k.rows() < 1 || k.cols() < 1 || k.rows() % 2 == 0 || k.cols() % 2 == 0)
    fail(ErrorCode::InvalidParameter, "smoothing kernel must have odd, positive size");
  const double gain = k.norm();
  if (!(gain > 0)) fail(ErrorCode::InvalidParameter, "smoothing kernel must be non-zero");

  Rng rng(derive_seed(source.seed, 0));
  Eigen::MatrixXd noise(rows + k.rows() - 1, cols + k.cols() - 1);
  // Row-major fill order keeps the canvas independent of Eigen's storage order.
  for (Eigen::Index i = 0; i < noise.rows(); ++i)
    for (Eigen::Index j = 0; j < noise.cols(); ++j) noise(i, j) = rng.normal();

  Eigen::MatrixXd canvas(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      canvas(i, j) = noise.block(i, j, k.rows(), k.cols()).cwiseProduct(k).sum() / gain;
  return canvas;
}

std::uint8_t to_pixel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

}  // namespace

FrameSequence generate_pristine(const SourceModel& source, long n_frames, Eigen::Index height,
                                Eigen::Index width) {
  if (n_frames < 1) fail(ErrorCode::InvalidParameter, "n_frames must be >= 1");
  if (height < 1 || width < 1) fail(ErrorCode::InvalidParameter, "frame dimensions must be positive");

  const Eigen::Index span_rows = std::abs(source.drift_rows) * (n_frames - 1);
  const Eigen::Index span_cols = std::abs(source.drift_cols) * (n_frames - 1);
  const auto canvas = smooth_canvas(source, height + span_rows, width + span_cols);

  FrameSequence seq;
  seq.frame_index_origin = 0;
  for (long t = 0; t < n_frames; ++t) {
    const Eigen::Index r0 = source.drift_rows >= 0 ? source.drift_rows * t
                                                   : -source.drift_rows * (n_frames - 1 - t);
    const Eigen::Index c0 = source.drift_cols >= 0 ? source.drift_cols * t
                                                   : -source.drift_cols * (n_frames - 1 - t);
    Rng noise(derive_seed(source.seed, 1000 + static_cast<std::uint64_t>(t)));
    Frame frame(height, width);
    for (Eigen::Index i = 0; i < height; ++i)
      for (Eigen::Index j = 0; j < width; ++j) {
        double v = source.mean + source.amplitude * canvas(r0 + i, c0 + j);
        if (source.frame_noise > 0) v += source.frame_noise * noise.normal();
        frame.luma(i, j) = to_pixel(v);
      }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

ForgedSequence generate_forged(const SourceModel& source_a, const SourceModel& source_b,
                               const RegionTrajectory& region, long n_frames,
                               Eigen::Index height, Eigen::Index width) {
  for (long t = 0; t < n_frames; ++t) {
    if (!region.active(t, n_frames)) continue;
    const Region r = region.at(t);
    if (r.row < 0 || r.col < 0 || r.row + r.height > height || r.col + r.width > width)
      fail(ErrorCode::RegionOutOfBounds,
           "spliced region leaves the frame at frame " + std::to_string(t));
  }

  ForgedSequence out;
  out.frames = generate_pristine(source_a, n_frames, height, width);
  out.masks.assign(static_cast<std::size_t>(n_frames),
                   GroundTruthMask{LabelRaster::Zero(height, width)});
  const bool any = [&] {
    for (long t = 0; t < n_frames; ++t)
      if (region.active(t, n_frames)) return true;
    return false;
  }();
  if (!any) return out;

  const auto donor = generate_pristine(source_b, n_frames, height, width);
  for (long t = 0; t < n_frames; ++t) {
    if (!region.active(t, n_frames)) continue;
    const Region r = region.at(t);
    const auto k = static_cast<std::size_t>(t);
    out.frames.frames[k].luma.block(r.row, r.col, r.height, r.width) =
        donor.frames[k].luma.block(r.row, r.col, r.height, r.width);
    out.masks[k].labels.block(r.row, r.col, r.height, r.width).setOnes();
  }
  return out;
}

Scenario default_scenario(std::uint64_t seed) {
  Scenario s;
  s.source_a.seed = derive_seed(seed, 0);
  s.source_a.kernel = gaussian_kernel(1.0, 3);
  s.source_a.drift_rows = 0;
  s.source_a.drift_cols = 1;
  s.source_b.seed = derive_seed(seed, 1);
  s.source_b.kernel = gaussian_kernel(0.6, 2);
  s.source_b.drift_rows = 1;
  s.source_b.drift_cols = 0;
  s.region.start = {40, 40, 112, 112};
  s.region.velocity_rows = 1;
  s.region.velocity_cols = 1;
  s.region.first_frame = s.train_frames;
  s.region.last_frame = -1;
  return s;
}

ForgedSequence generate_scenario(const Scenario& s) {
  if (s.train_frames < 0 || s.test_frames < 1)
    fail(ErrorCode::InvalidParameter, "scenario needs at least one test frame");
  return generate_forged(s.source_a, s.source_b, s.region, s.train_frames + s.test_frames,
                         s.height, s.width);
}

std::string scenario_manifest(const Scenario& s) {
  using nlohmann::json;
  auto source = [](const SourceModel& m) {
    std::vector<std::vector<double>> kernel;
    for (Eigen::Index i = 0; i < m.kernel.rows(); ++i) {
      kernel.emplace_back();
      for (Eigen::Index j = 0; j < m.kernel.cols(); ++j) kernel.back().push_back(m.kernel(i, j));
    }
    return json{{"seed", m.seed},           {"mean", m.mean},
                {"amplitude", m.amplitude}, {"drift", {m.drift_rows, m.drift_cols}},
                {"frame_noise", m.frame_noise}, {"kernel", kernel}};
  };
  json doc;
  doc["height"] = s.height;
  doc["width"] = s.width;
  doc["train_frames"] = s.train_frames;
  doc["test_frames"] = s.test_frames;
  doc["patch"] = s.geometry.patch;
  doc["stride"] = s.geometry.stride;
  doc["source_a"] = source(s.source_a);
  doc["source_b"] = source(s.source_b);
  doc["region"] = {{"row", s.region.start.row},
                   {"col", s.region.start.col},
                   {"height", s.region.start.height},
                   {"width", s.region.start.width},
                   {"velocity", {s.region.velocity_rows, s.region.velocity_cols}},
                   {"first_frame", s.region.first_frame},
                   {"last_frame", s.region.last_frame}};
  return doc.dump(2);
}

double chi_square_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) fail(ErrorCode::ShapeError, "histogram sizes differ");
  double d = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double s = p(k) + q(k);
    if (s > 0) d += (p(k) - q(k)) * (p(k) - q(k)) / s;
  }
  return 0.5 * d;
}

Eigen::VectorXd frame_cooccurrence_distribution(const FrameSequence& frames,
                                                const FeatureConfig& config) {
  const SymmetryMerger merger(config.symmetry, config.quantizer.truncation);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(merger.output_dim());
  for (const auto& frame : frames.frames) {
    const auto qh = quantize_truncate(compute_residual(frame, Orientation::Horizontal), config.quantizer);
    const auto qv = quantize_truncate(compute_residual(frame, Orientation::Vertical), config.quantizer);
    total += merger.merge(
        cooccurrence_histogram(qh, {0, 0, qh.rows(), qh.cols()}, TupleDirection::AlongColumns,
                               config.quantizer.truncation),
        cooccurrence_histogram(qv, {0, 0, qv.rows(), qv.cols()}, TupleDirection::AlongRows,
                               config.quantizer.truncation));
  }
  return total / total.sum();
}

}  // namespace vsl::synth
