#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "vsl/error.hpp"
#include "vsl/synthgen.hpp"

using namespace vsl;
using namespace vsl::synth;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidParameter;
}

bool inside(const Region& r, Eigen::Index i, Eigen::Index j) {
  return i >= r.row && i < r.row + r.height && j >= r.col && j < r.col + r.width;
}

double sample_variance(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace

TEST(Synth, GaussianKernelIsNormalizedAndSymmetric) {
  const auto k = gaussian_kernel(1.0, 3);
  ASSERT_EQ(k.rows(), 7);
  EXPECT_NEAR(k.sum(), 1.0, 1e-14);
  EXPECT_NEAR((k - k.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-17);
  EXPECT_NEAR((k - k.colwise().reverse()).cwiseAbs().maxCoeff(), 0.0, 1e-17);
  EXPECT_EQ(code_of([] { gaussian_kernel(0.0, 2); }), ErrorCode::InvalidParameter);
}

TEST(Synth, SameSeedIsBitIdentical) {
  SourceModel m;
  m.frame_noise = 1.5;
  const auto a = generate_pristine(m, 4, 40, 48);
  const auto b = generate_pristine(m, 4, 40, 48);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(a.frames[t], b.frames[t]);
  m.seed = 2;
  EXPECT_FALSE(generate_pristine(m, 1, 40, 48).frames[0] == a.frames[0]);
}

TEST(Synth, ZeroDriftWithoutNoiseGivesIdenticalFrames) {
  SourceModel m;
  m.drift_rows = 0;
  m.drift_cols = 0;
  const auto s = generate_pristine(m, 5, 32, 32);
  for (std::size_t t = 1; t < 5; ++t) EXPECT_EQ(s.frames[t], s.frames[0]);
  m.frame_noise = 2.0;
  const auto noisy = generate_pristine(m, 2, 32, 32);
  EXPECT_FALSE(noisy.frames[1] == noisy.frames[0]);
}

TEST(Synth, DriftTranslatesContent) {
  SourceModel m;
  m.drift_rows = 2;
  m.drift_cols = 1;
  const auto s = generate_pristine(m, 2, 30, 30);
  EXPECT_TRUE((s.frames[1].luma.block(0, 0, 28, 29) == s.frames[0].luma.block(2, 1, 28, 29)).all());
}

TEST(Synth, DefaultTextureIsNonDegenerate) {
  const auto s = generate_pristine(default_scenario().source_a, 1, 256, 256);
  std::set<int> levels;
  for (auto v : s.frames[0].luma.reshaped()) levels.insert(v);
  EXPECT_GT(levels.size(), 100u);
}

TEST(Synth, InvalidDimensions) {
  EXPECT_EQ(code_of([] { generate_pristine(SourceModel{}, 1, 0, 10); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { generate_pristine(SourceModel{}, 0, 10, 10); }), ErrorCode::InvalidParameter);
}

TEST(Synth, ZeroAreaRegionEqualsPristine) {
  SourceModel a, b;
  b.seed = 9;
  RegionTrajectory r;
  r.start = {5, 5, 0, 0};
  const auto forged = generate_forged(a, b, r, 3, 24, 24);
  const auto pristine = generate_pristine(a, 3, 24, 24);
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(forged.frames.frames[t], pristine.frames[t]);
    EXPECT_EQ(forged.masks[t].labels.cast<int>().sum(), 0);
  }
}

TEST(Synth, MasksAndPastedPixelsAgreeExactly) {
  SourceModel a, b;
  b.seed = 17;
  b.kernel = gaussian_kernel(0.6, 2);
  b.drift_rows = 1;
  b.drift_cols = 0;
  RegionTrajectory r;
  r.start = {3, 4, 10, 12};
  r.velocity_rows = 2;
  r.velocity_cols = 1;
  r.first_frame = 1;
  r.last_frame = 3;
  const long n = 5;
  const auto forged = generate_forged(a, b, r, n, 40, 40);
  const auto src_a = generate_pristine(a, n, 40, 40);
  const auto src_b = generate_pristine(b, n, 40, 40);
  for (long t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(t);
    const bool active = t >= 1 && t <= 3;
    const Region at{3 + 2 * (t - 1), 4 + (t - 1), 10, 12};
    for (Eigen::Index i = 0; i < 40; ++i)
      for (Eigen::Index j = 0; j < 40; ++j) {
        const bool in = active && inside(at, i, j);
        ASSERT_EQ(forged.masks[k].labels(i, j), in ? 1 : 0);
        ASSERT_EQ(forged.frames.frames[k].luma(i, j),
                  (in ? src_b : src_a).frames[k].luma(i, j));
      }
  }
}

TEST(Synth, RegionOutOfBounds) {
  RegionTrajectory r;
  r.start = {20, 20, 10, 10};
  r.velocity_cols = 3;
  EXPECT_EQ(code_of([&] { generate_forged(SourceModel{}, SourceModel{}, r, 6, 40, 40); }),
            ErrorCode::RegionOutOfBounds);
  r.velocity_cols = 0;
  r.start = {-1, 0, 4, 4};
  EXPECT_EQ(code_of([&] { generate_forged(SourceModel{}, SourceModel{}, r, 1, 40, 40); }),
            ErrorCode::RegionOutOfBounds);
}

TEST(Synth, ResidualVarianceDiffersInsideRegion) {
  // Two-sample test on the log of the variance ratio. Residuals are sampled
  // on a sparse lattice (every 4th pixel, wider than the filter and
  // smoothing support) so the samples are close to independent.
  const auto scenario = default_scenario();
  const auto forged = generate_scenario(scenario);
  const long t = scenario.train_frames + 5;
  const auto region = scenario.region.at(t);
  const auto res = compute_residual(forged.frames.frames[static_cast<std::size_t>(t)],
                                    Orientation::Horizontal);
  std::vector<double> in, out;
  for (Eigen::Index i = 0; i < res.rows(); i += 4)
    for (Eigen::Index j = 0; j < res.cols(); j += 4) {
      const bool all_in = inside(region, i, j) && inside(region, i, j + 3);
      const bool all_out = !inside(region, i, j) && !inside(region, i, j + 3);
      if (all_in) in.push_back(res(i, j));
      if (all_out) out.push_back(res(i, j));
    }
  ASSERT_GT(in.size(), 100u);
  ASSERT_GT(out.size(), 100u);
  const double log_ratio = std::log(sample_variance(in) / sample_variance(out));
  const double se = std::sqrt(2.0 / static_cast<double>(in.size() - 1) +
                              2.0 / static_cast<double>(out.size() - 1));
  EXPECT_GT(std::abs(log_ratio) / se, 2.576);  // two-sided, p < 0.01
}

TEST(Synth, SourcesHaveDistinctCooccurrenceDistributions) {
  const auto scenario = default_scenario();
  const FeatureConfig config;
  const auto a = generate_pristine(scenario.source_a, 2, 128, 128);
  const auto b = generate_pristine(scenario.source_b, 2, 128, 128);
  const auto pa = frame_cooccurrence_distribution(a, config);
  const auto pb = frame_cooccurrence_distribution(b, config);
  EXPECT_NEAR(pa.sum(), 1.0, 1e-12);
  EXPECT_EQ(chi_square_distance(pa, pa), 0.0);
  EXPECT_GT(chi_square_distance(pa, pb), kDefaultChiSquareFloor);
  // Same kernel, different seed: far below the floor.
  auto c_model = scenario.source_a;
  c_model.seed += 1000;
  const auto pc = frame_cooccurrence_distribution(generate_pristine(c_model, 2, 128, 128), config);
  EXPECT_LT(chi_square_distance(pa, pc), kDefaultChiSquareFloor / 5);
}

TEST(Synth, ScenarioLayout) {
  const auto scenario = default_scenario();
  const auto forged = generate_scenario(scenario);
  ASSERT_EQ(forged.frames.size(), 90u);
  EXPECT_EQ(forged.frames.width(), 256);
  for (long t = 0; t < scenario.train_frames; ++t)
    EXPECT_EQ(forged.masks[static_cast<std::size_t>(t)].labels.cast<int>().sum(), 0);
  EXPECT_EQ(forged.masks[50].labels.cast<int>().sum(), 112 * 112);
  const auto manifest = scenario_manifest(scenario);
  EXPECT_NE(manifest.find("\"seed\""), std::string::npos);
}
