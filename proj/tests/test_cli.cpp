#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "vsl/cli.hpp"
#include "vsl/neural/checkpoint.hpp"
#include "vsl/neural/train.hpp"

using namespace vsl;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::path(::testing::TempDir()) / ("vsl_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  return json::parse(in);
}

int run(std::vector<std::string> args) { return cli::run(args); }

// Small synthetic data set shared by the tests: 4 pristine + 3 forged frames
// and the feature file extracted from them.
class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fresh_dir("pipeline");
    ASSERT_EQ(run({"synth", "--out", (root_ / "synth").string(), "--train-frames", "4",
                   "--test-frames", "3"}),
              0);
    ASSERT_EQ(run({"extract", "--frames", (root_ / "synth" / "frames").string(), "--last", "6",
                   "--out", (root_ / "features").string()}),
              0);
  }
  static fs::path features() { return root_ / "features" / "features.vff"; }
  static fs::path root_;
};
fs::path CliPipeline::root_;

}  // namespace

TEST(CliExitCodes, UsageErrors) {
  EXPECT_EQ(run({}), cli::kUsageError);
  EXPECT_EQ(run({"bogus"}), cli::kUsageError);
  EXPECT_EQ(run({"gradcheck"}), cli::kUsageError);  // --out is required
  EXPECT_EQ(run({"--help"}), cli::kOk);
  EXPECT_EQ(run({"train", "--help"}), cli::kOk);
  const auto dir = fresh_dir("usage");
  EXPECT_EQ(run({"extract", "--frames", (dir / "nope").string(), "--last", "1", "--out",
                 (dir / "o").string()}),
            cli::kUsageError);
  EXPECT_EQ(run({"gradcheck", "--out", (dir / "o").string(), "--workers", "0"}), cli::kUsageError);
  EXPECT_EQ(run({"gradcheck", "--out", (dir / "o").string(), "--model", "cnn"}), cli::kUsageError);
}

TEST(CliExitCodes, DataErrorsAreRuntimeErrors) {
  const auto dir = fresh_dir("data");
  fs::create_directories(dir / "frames");
  EXPECT_EQ(run({"extract", "--frames", (dir / "frames").string(), "--last", "1", "--out",
                 (dir / "o").string()}),
            cli::kRuntimeError);
}

TEST(CliGradcheck, WritesReport) {
  const auto dir = fresh_dir("gradcheck");
  ASSERT_EQ(run({"gradcheck", "--out", dir.string(), "--model", "feedforward", "--seeds", "2"}),
            cli::kOk);
  const auto report = read_json(dir / "gradcheck.json");
  EXPECT_TRUE(report.contains("eps"));
  const auto manifest = read_json(dir / "manifest.json");
  EXPECT_EQ(manifest["command"], "gradcheck");
  EXPECT_EQ(manifest["tool"], "vsl");
  EXPECT_EQ(manifest["config"]["seeds"], "2");
  EXPECT_EQ(manifest["config"]["input-dim"], "10");
}

TEST(CliConfig, FlagsOverrideFileOverrideDefaults) {
  const auto dir = fresh_dir("config");
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# shared settings\n"
                        "hidden = 3\n"
                        "gradcheck.steps = 2\n"
                        "train.epochs = 9\n";  // other command: ignored here
  ASSERT_EQ(run({"gradcheck", "--config", cfg.string(), "--out", (dir / "a").string(), "--model",
                 "recurrent", "--hidden", "2"}),
            cli::kOk);
  const auto config = read_json(dir / "a" / "manifest.json")["config"];
  EXPECT_EQ(config["hidden"], "2");   // flag
  EXPECT_EQ(config["steps"], "2");    // file
  EXPECT_EQ(config["batch"], "3");    // default
}

TEST(CliConfig, UnknownKeysAreRejected) {
  const auto dir = fresh_dir("config_bad");
  std::ofstream(dir / "a.cfg") << "no_such_option = 1\n";
  EXPECT_EQ(run({"gradcheck", "--config", (dir / "a.cfg").string(), "--out", (dir / "o").string()}),
            cli::kUsageError);
  std::ofstream(dir / "b.cfg") << "gradcheck.epochs = 1\n";
  EXPECT_EQ(run({"gradcheck", "--config", (dir / "b.cfg").string(), "--out", (dir / "o").string()}),
            cli::kUsageError);
  std::ofstream(dir / "c.cfg") << "just words\n";
  EXPECT_EQ(run({"gradcheck", "--config", (dir / "c.cfg").string(), "--out", (dir / "o").string()}),
            cli::kUsageError);
}

TEST_F(CliPipeline, SynthAndExtractManifests) {
  EXPECT_TRUE(fs::exists(root_ / "synth" / "frames" / "frame_0006.pgm"));
  EXPECT_TRUE(fs::exists(root_ / "synth" / "masks" / "mask_0006.pgm"));
  EXPECT_TRUE(fs::exists(root_ / "synth" / "scenario.json"));
  const auto manifest = read_json(root_ / "features" / "manifest.json");
  EXPECT_EQ(manifest["command"], "extract");
  EXPECT_EQ(manifest["outputs"], json::array({"features.vff"}));
}

TEST_F(CliPipeline, TrainWithoutEpochsKeepsInitialization) {
  const auto out = root_ / "train0";
  ASSERT_EQ(run({"train", "--features", features().string(), "--pristine-last", "3", "--epochs",
                 "0", "--hidden", "5", "--seed", "7", "--out", out.string()}),
            cli::kOk);
  const auto cp = neural::load_checkpoint(out / "model.json");
  EXPECT_TRUE(cp.epoch_losses.empty());
  EXPECT_EQ(cp.training_frames, (std::vector<long>{0, 1, 2, 3}));
  neural::TrainConfig config;
  config.seed = 7;
  const auto& model = std::get<neural::DenseAutoencoderd>(cp.model);
  const auto expected = neural::make_dense_autoencoder<double>(model.input_dim(), 5, config);
  EXPECT_TRUE((model.parameters().array() == expected.parameters().array()).all());
}

TEST_F(CliPipeline, ScoreEvaluateAndRoc) {
  const auto train = root_ / "train";
  ASSERT_EQ(run({"train", "--features", features().string(), "--pristine-last", "3", "--epochs",
                 "3", "--hidden", "8", "--out", train.string()}),
            cli::kOk);
  // Scoring frames the model was trained on is refused.
  EXPECT_EQ(run({"score", "--checkpoint", (train / "model.json").string(), "--features",
                 features().string(), "--test-first", "3", "--out", (root_ / "bad").string()}),
            cli::kUsageError);
  const auto score = root_ / "score";
  ASSERT_EQ(run({"score", "--checkpoint", (train / "model.json").string(), "--features",
                 features().string(), "--test-first", "4", "--threshold", "0.01", "--out",
                 score.string()}),
            cli::kOk);
  EXPECT_TRUE(fs::exists(score / "heatmaps" / "heat_0004.vhm"));
  EXPECT_TRUE(fs::exists(score / "heatmaps" / "heat_0006.png"));
  EXPECT_TRUE(fs::exists(score / "detections" / "detect_0006.pgm"));
  EXPECT_FALSE(fs::exists(score / "heatmaps" / "heat_0003.vhm"));

  const auto roc = root_ / "roc";
  ASSERT_EQ(run({"roc", "--heatmaps", (score / "heatmaps").string(), "--masks",
                 (root_ / "synth" / "masks").string(), "--n-thresholds", "20", "--out", roc.string()}),
            cli::kOk);
  const auto summary = read_json(roc / "roc.json");
  EXPECT_GE(summary["auc"].get<double>(), 0.0);
  EXPECT_LE(summary["auc"].get<double>(), 1.0);
  EXPECT_TRUE(fs::exists(roc / "roc.csv"));
  EXPECT_TRUE(fs::exists(roc / "roc.svg"));

  const auto eval = root_ / "eval";
  ASSERT_EQ(run({"evaluate", "--heatmaps", (score / "heatmaps").string(), "--masks",
                 (root_ / "synth" / "masks").string(), "--threshold", "0.01", "--out",
                 eval.string()}),
            cli::kOk);
  EXPECT_TRUE(fs::exists(eval / "evaluation.json"));
}
