#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "vsl/features.hpp"
#include "vsl/frame_io.hpp"

namespace vsl::synth {

/// Smoothing kernel: normalized 2-D Gaussian of the given width, truncated
/// at `radius` pixels.
Eigen::MatrixXd gaussian_kernel(double sigma, int radius);

/// Texture source standing in for one camera. Frames are crops of a large
/// canvas of white Gaussian noise convolved with `kernel`, rescaled to unit
/// variance, then mapped to mean + amplitude * value and rounded to 8 bits.
/// The crop moves by (drift_rows, drift_cols) pixels per frame.
///
/// Per-frame noise policy: every frame gets its own independent Gaussian
/// noise of standard deviation `frame_noise` (before rounding), drawn from a
/// stream derived from (seed, frame number). With zero drift and zero
/// frame_noise all frames are identical.
struct SourceModel {
  std::uint64_t seed = 1;
  Eigen::MatrixXd kernel = gaussian_kernel(1.0, 3);
  double mean = 128.0;
  double amplitude = 40.0;
  int drift_rows = 0;
  int drift_cols = 1;
  double frame_noise = 0.0;
};

/// Rectangle moving by (velocity_rows, velocity_cols) per frame, present in
/// frames first_frame..last_frame inclusive (sequence-relative numbering).
struct RegionTrajectory {
  Region start;
  int velocity_rows = 0;
  int velocity_cols = 0;
  long first_frame = 0;
  long last_frame = -1;  // -1: until the end of the sequence

  bool active(long frame, long n_frames) const;
  Region at(long frame) const;
};

struct ForgedSequence {
  FrameSequence frames;
  std::vector<GroundTruthMask> masks;
};

FrameSequence generate_pristine(const SourceModel& source, long n_frames, Eigen::Index height,
                                Eigen::Index width);

/// Frames of source_a with the trajectory's rectangle replaced, pixel for
/// pixel, by the co-located content of source_b.
ForgedSequence generate_forged(const SourceModel& source_a, const SourceModel& source_b,
                               const RegionTrajectory& region, long n_frames,
                               Eigen::Index height, Eigen::Index width);

/// Desk-scale experiment: 256x256 frames, the first `train_frames` pristine,
/// then `test_frames` frames carrying a moving spliced rectangle from a
/// source with a sharper smoothing kernel (different residual statistics,
/// same mean intensity).
struct Scenario {
  SourceModel source_a;
  SourceModel source_b;
  RegionTrajectory region;
  Eigen::Index height = 256;
  Eigen::Index width = 256;
  long train_frames = 50;
  long test_frames = 40;
  PatchGeometry geometry{64, 16};
};

Scenario default_scenario(std::uint64_t seed = 2017);

/// Frames 0..train_frames + test_frames - 1 with per-frame masks.
ForgedSequence generate_scenario(const Scenario& scenario);

/// JSON manifest with seeds, kernels, trajectories and sizes.
std::string scenario_manifest(const Scenario& scenario);

/// Chi-square distance 0.5 * sum (p - q)^2 / (p + q) between two
/// normalized histograms.
double chi_square_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Pooled, orbit-merged co-occurrence histogram of whole frames, normalized
/// to unit sum.
Eigen::VectorXd frame_cooccurrence_distribution(const FrameSequence& frames,
                                                const FeatureConfig& config);

/// Lower bound on chi_square_distance between source_a and source_b
/// co-occurrence distributions for the default scenario.
inline constexpr double kDefaultChiSquareFloor = 0.05;

}  // namespace vsl::synth
