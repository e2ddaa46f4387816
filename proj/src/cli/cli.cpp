#include "vsl/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vsl/detector.hpp"
#include "vsl/eval.hpp"
#include "vsl/feature_io.hpp"
#include "vsl/neural/checkpoint.hpp"
#include "vsl/neural/gradcheck.hpp"
#include "vsl/parallel.hpp"
#include "vsl/synthgen.hpp"

namespace vsl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kFramePattern = "frame_%04d.pgm";
constexpr const char* kMaskPattern = "mask_%04d.pgm";
constexpr const char* kHeatPattern = "heat_%04d.vhm";

/// Invalid configuration detected after parsing; reported as a usage error.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& field, const std::string& message)
      : std::runtime_error("--" + field + ": " + message) {}
};

void log(const std::string& message) { std::clog << "vsl: " << message << '\n'; }

// ---------------------------------------------------------------------------
// Option groups shared between commands

struct Common {
  fs::path out;
  int workers = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", "key=value configuration file (flags override it)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--workers", c.workers, "Maximum number of worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct FeatureOptions {
  Eigen::Index patch = 128;
  Eigen::Index stride = 8;
  double q = 3.0;
  int truncation = 2;
  std::string symmetry = "sign+reversal";

  FeatureConfig config() const {
    FeatureConfig fc;
    fc.geometry = {patch, stride};
    fc.quantizer = {q, truncation};
    fc.symmetry = parse_symmetry(symmetry);
    return fc;
  }
};

void add_feature_options(CLI::App* cmd, FeatureOptions& f) {
  cmd->add_option("--patch", f.patch, "Patch side in pixels")->check(CLI::Range(8, 1 << 20))
      ->capture_default_str();
  cmd->add_option("--stride", f.stride, "Patch stride in pixels")->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--q", f.q, "Quantization step")->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--T", f.truncation, "Truncation threshold")->check(CLI::Range(1, 16))
      ->capture_default_str();
  cmd->add_option("--symmetry", f.symmetry, "Bin merging: none, sign, reversal, sign+reversal")
      ->check(CLI::IsMember({"none", "sign", "reversal", "sign+reversal"}))
      ->capture_default_str();
}

// ---------------------------------------------------------------------------
// Configuration file: one `key = value` per line, `#` starts a comment. A key
// is an option name without dashes, optionally prefixed with a command name
// ("train.epochs = 5") to apply to that command only. Values for options
// taking several values are separated by commas. File values are injected as
// flags unless the same option was given on the command line.

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config", "cannot read " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw UsageError("config", path + ":" + std::to_string(number) + ": expected key = value");
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    entries.emplace_back(trim(line.substr(0, eq)), value);
  }
  return entries;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::vector<std::string> apply_config_file(const CLI::App& app, std::vector<std::string> args) {
  if (args.empty() || args.front().empty() || args.front().front() == '-') return args;
  const CLI::App* cmd = nullptr;
  try {
    cmd = app.get_subcommand(args.front());
  } catch (const CLI::OptionNotFound&) {
    return args;  // unknown command; let the parser report it
  }
  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;

  const auto given = args;
  for (auto [key, value] : read_config_file(path)) {
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      if (key.substr(0, dot) != cmd->get_name()) continue;
      key = key.substr(dot + 1);
    }
    if (key == "config") throw UsageError("config", "configuration files cannot be nested");
    const CLI::Option* opt = nullptr;
    for (const CLI::Option* o : cmd->get_options())
      if (o->check_lname(key)) opt = o;
    if (opt == nullptr) {
      if (dot != std::string::npos) throw UsageError(key, "unknown option in " + path);
      // Shared files may hold keys for other commands, but not unknown keys.
      const auto commands = app.get_subcommands([](const CLI::App*) { return true; });
      const bool known = std::any_of(commands.begin(), commands.end(), [&](const CLI::App* c) {
        const auto options = c->get_options();
        return std::any_of(options.begin(), options.end(),
                           [&](const CLI::Option* o) { return o->check_lname(key); });
      });
      if (!known) throw UsageError(key, "unknown option in " + path);
      continue;
    }
    if (given_on_command_line(given, key)) continue;
    if (opt->get_expected_min() == 0) {
      if (CLI::detail::to_flag_value(value) > 0) args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    std::stringstream parts(value);
    for (std::string part; std::getline(parts, part, ',');) args.push_back(trim(part));
  }
  return args;
}

// ---------------------------------------------------------------------------
// Run manifest: every resolved option of the command plus the outputs.

json resolved_config(const CLI::App* cmd) {
  json config = json::object();
  for (const CLI::Option* opt : cmd->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    const auto& results = opt->results();
    if (!results.empty()) {
      config[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (!opt->get_default_str().empty()) {
      config[name] = opt->get_default_str();
    } else {
      config[name] = nullptr;
    }
  }
  return config;
}

void write_manifest(const CLI::App* cmd, const fs::path& out, const std::vector<fs::path>& outputs,
                    json extra = json::object()) {
  json doc;
  doc["tool"] = "vsl";
  doc["version"] = kVersion;
  doc["command"] = cmd->get_name();
  doc["config"] = resolved_config(cmd);
  std::vector<std::string> names;
  for (const auto& p : outputs) names.push_back(fs::relative(p, out).generic_string());
  doc["outputs"] = names;
  for (auto& [key, value] : extra.items()) doc[key] = value;
  std::ofstream file(out / "manifest.json");
  if (!file) fail(ErrorCode::NotFound, "cannot write " + (out / "manifest.json").string());
  file << doc.dump(2) << '\n';
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::NotFound, "cannot create directory " + dir.string() + ": " + ec.message());
}

// Frames of `field` whose indices fall in [first, last]; -1 bounds are open.
FeatureField select_frames(const FeatureField& field, long first, long last,
                           const std::string& option) {
  const auto& idx = field.frame_indices;
  const auto lo = std::find_if(idx.begin(), idx.end(),
                               [&](long i) { return first < 0 || i >= first; });
  const auto hi = std::find_if(lo, idx.end(), [&](long i) { return last >= 0 && i > last; });
  if (lo == hi) throw UsageError(option, "no frames of the feature file fall in the range");
  return field.slice_frames(lo - idx.begin(), hi - lo);
}

std::vector<fs::path> heatmap_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::NotFound, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".vhm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorCode::NotFound, "no heat maps (*.vhm) in " + dir.string());
  return files;
}

VideoResult load_video(const fs::path& heat_dir, const fs::path& mask_dir,
                       const std::string& mask_pattern) {
  VideoResult video;
  for (const auto& file : heatmap_files(heat_dir)) {
    video.heatmaps.push_back(read_heatmap(file));
    const auto& heat = video.heatmaps.back();
    video.ground_truth.push_back(load_mask(mask_dir / format_index(mask_pattern, heat.frame_index),
                                           heat.height(), heat.width()));
  }
  return video;
}

json rates_to_json(const PixelRates& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"tpr", opt(r.tpr)},
          {"fpr", opt(r.fpr)},
          {"true_positives", r.true_positives},
          {"false_positives", r.false_positives},
          {"true_negatives", r.true_negatives},
          {"false_negatives", r.false_negatives}};
}

// ---------------------------------------------------------------------------
// Commands

struct SynthCommand {
  Common common;
  std::uint64_t seed = 2017;
  long train_frames = 50;
  long test_frames = 40;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Generate the synthetic pristine/forged scenario");
    add_common(cmd, common);
    cmd->add_option("--seed", seed, "Scenario seed")->capture_default_str();
    cmd->add_option("--train-frames", train_frames, "Leading pristine frames")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd->add_option("--test-frames", test_frames, "Frames carrying the spliced region")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmd->callback([this, cmd] { run(cmd); });
  }

  void run(const CLI::App* cmd) const {
    auto scenario = synth::default_scenario(seed);
    scenario.train_frames = train_frames;
    scenario.test_frames = test_frames;
    scenario.region.first_frame = train_frames;
    const auto forged = synth::generate_scenario(scenario);

    make_dir(common.out / "frames");
    make_dir(common.out / "masks");
    std::vector<fs::path> outputs;
    const auto n = forged.frames.frames.size();
    std::vector<fs::path> frame_paths(n), mask_paths(n);
    for (std::size_t t = 0; t < n; ++t) {
      frame_paths[t] = common.out / "frames" / format_index(kFramePattern, static_cast<long>(t));
      mask_paths[t] = common.out / "masks" / format_index(kMaskPattern, static_cast<long>(t));
    }
    parallel_for(n, common.workers, [&](std::size_t t) {
      write_pgm(frame_paths[t], forged.frames.frames[t].luma);
      write_mask_pgm(mask_paths[t], forged.masks[t].labels);
    });
    outputs.insert(outputs.end(), frame_paths.begin(), frame_paths.end());
    outputs.insert(outputs.end(), mask_paths.begin(), mask_paths.end());
    {
      std::ofstream file(common.out / "scenario.json");
      file << synth::scenario_manifest(scenario) << '\n';
      outputs.push_back(common.out / "scenario.json");
    }
    write_manifest(cmd, common.out, outputs,
                   {{"pristine_frames", {0, train_frames - 1}},
                    {"test_frames", {train_frames, train_frames + test_frames - 1}}});
    log("wrote " + std::to_string(n) + " frames and masks to " + common.out.string());
  }
};

struct ExtractCommand {
  Common common;
  FeatureOptions features;
  fs::path frames;
  std::string pattern = kFramePattern;
  long first = 0;
  long last = -1;
  bool csv = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("extract", "Compute co-occurrence features of a frame sequence");
    add_common(cmd, common);
    add_feature_options(cmd, features);
    cmd->add_option("--frames", frames, "Directory of frame images")->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--pattern", pattern, "printf-style frame file name")->capture_default_str();
    cmd->add_option("--first", first, "First frame index")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--last", last, "Last frame index (inclusive)")->required()
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--csv", csv, "Also write features.csv");
    cmd->callback([this, cmd] { run(cmd); });
  }

  void run(const CLI::App* cmd) const {
    if (last < first) throw UsageError("last", "must not precede --first");
    const auto config = features.config();
    const auto sequence = load_frame_sequence(frames, pattern, first, last, common.workers);
    log("extracting features of " + std::to_string(sequence.frames.size()) + " frames");
    const auto field = extract_feature_field(sequence, config, common.workers);

    make_dir(common.out);
    std::vector<fs::path> outputs{common.out / "features.vff"};
    write_feature_field(outputs.back(), field);
    if (csv) {
      outputs.push_back(common.out / "features.csv");
      write_feature_csv(outputs.back(), field);
    }
    write_manifest(cmd, common.out, outputs,
                   {{"feature_dim", field.dim()},
                    {"grid", {field.grid.rows, field.grid.cols}},
                    {"frame_size", {field.frame_height, field.frame_width}}});
    log("feature dimension " + std::to_string(field.dim()) + ", grid " +
        std::to_string(field.grid.rows) + "x" + std::to_string(field.grid.cols));
  }
};

struct TrainCommand {
  Common common;
  fs::path features;
  long pristine_first = -1;
  long pristine_last = -1;
  std::string model = "feedforward";
  Eigen::Index hidden = 100;
  int epochs = 30;
  int batch = 0;
  std::uint64_t seed = 0;
  int unroll = 25;
  double init_scale = 1.0;
  neural::AdamHyper adam;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Fit an autoencoder on pristine-frame features");
    add_common(cmd, common);
    cmd->add_option("--features", features, "Feature file from extract")->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--pristine-first", pristine_first, "First pristine frame index (default: all)");
    cmd->add_option("--pristine-last", pristine_last, "Last pristine frame index (default: all)");
    cmd->add_option("--model", model, "feedforward or recurrent")
        ->check(CLI::IsMember({"feedforward", "recurrent", "dense", "lstm"}))
        ->capture_default_str();
    cmd->add_option("--hidden", hidden, "Hidden units")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--epochs", epochs, "Training epochs")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--batch", batch, "Minibatch size (0: 128 vectors or 64 sequences)")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd->add_option("--seed", seed, "Initialization and shuffling seed")->capture_default_str();
    cmd->add_option("--unroll", unroll, "Recurrent unroll length")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--init-scale", init_scale, "Initialization scale")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--lr", adam.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--beta1", adam.beta1, "Adam beta1")->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--beta2", adam.beta2, "Adam beta2")->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--epsilon", adam.epsilon, "Adam epsilon")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->callback([this, cmd] { run(cmd); });
  }

  void run(const CLI::App* cmd) const {
    if (pristine_first >= 0 && pristine_last >= 0 && pristine_last < pristine_first)
      throw UsageError("pristine-last", "must not precede --pristine-first");
    DetectorConfig config;
    config.kind = neural::parse_model_kind(model);
    config.hidden_dim = hidden;
    config.training = {epochs, batch > 0 ? batch : default_batch_size(config.kind), seed, unroll,
                       init_scale};
    config.adam = adam;

    const auto field = read_feature_field(features);
    const auto pristine = select_frames(field, pristine_first, pristine_last, "pristine-first");
    log("training " + std::string(neural::to_string(config.kind)) + " model on " +
        std::to_string(pristine.frame_count()) + " frames (" +
        std::to_string(pristine.values.cols()) + " patches)");
    const auto checkpoint = fit_detector(pristine, config);

    make_dir(common.out);
    const fs::path path = common.out / "model.json";
    neural::save_checkpoint(path, checkpoint);
    json extra = {{"training_frames", {pristine.frame_indices.front(), pristine.frame_indices.back()}},
                  {"batch_size", config.training.batch_size},
                  {"epoch_losses", checkpoint.epoch_losses}};
    write_manifest(cmd, common.out, {path}, extra);
    if (!checkpoint.epoch_losses.empty())
      log("final epoch loss " + std::to_string(checkpoint.epoch_losses.back()));
  }
};

struct ScoreCommand {
  Common common;
  fs::path checkpoint;
  fs::path features;
  long test_first = -1;
  long test_last = -1;
  std::optional<double> threshold;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("score", "Compute heat maps of test frames");
    add_common(cmd, common);
    cmd->add_option("--checkpoint", checkpoint, "Model file from train")->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--features", features, "Feature file from extract")->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--test-first", test_first, "First test frame index (default: all)");
    cmd->add_option("--test-last", test_last, "Last test frame index (default: all)");
    cmd->add_option("--threshold", threshold, "Also write detection masks at this threshold");
    cmd->callback([this, cmd] { run(cmd); });
  }

  void run(const CLI::App* cmd) const {
    if (test_first >= 0 && test_last >= 0 && test_last < test_first)
      throw UsageError("test-last", "must not precede --test-first");
    const auto cp = neural::load_checkpoint(checkpoint);
    const auto test = select_frames(read_feature_field(features), test_first, test_last,
                                    "test-first");
    for (long t : test.frame_indices)
      if (std::find(cp.training_frames.begin(), cp.training_frames.end(), t) !=
          cp.training_frames.end())
        throw UsageError("test-first", "test frame " + std::to_string(t) +
                                           " was used for training; ranges must be disjoint");

    log("scoring " + std::to_string(test.frame_count()) + " frames");
    const auto maps = detect(cp, test, common.workers);

    const fs::path heat_dir = common.out / "heatmaps";
    make_dir(heat_dir);
    if (threshold) make_dir(common.out / "detections");
    const auto n = maps.size();
    std::vector<std::vector<fs::path>> written(n);
    parallel_for(n, common.workers, [&](std::size_t k) {
      const auto& heat = maps[k];
      const fs::path base = heat_dir / format_index(kHeatPattern, heat.frame_index);
      write_heatmap(base, heat);
      fs::path png = base;
      png.replace_extension(".png");
      write_png(png, render_heatmap(heat));
      written[k] = {base, png};
      if (threshold) {
        const fs::path mask =
            common.out / "detections" / format_index("detect_%04d.pgm", heat.frame_index);
        write_mask_pgm(mask, threshold_map(heat, *threshold).positives);
        written[k].push_back(mask);
      }
    });
    std::vector<fs::path> outputs;
    for (const auto& w : written) outputs.insert(outputs.end(), w.begin(), w.end());
    write_manifest(cmd, common.out, outputs,
                   {{"model_kind", std::string(neural::to_string(neural::kind_of(cp.model)))},
                    {"test_frames", {test.frame_indices.front(), test.frame_indices.back()}}});
  }
};

struct EvaluateCommand {
  Common common;
  fs::path heatmaps;
  fs::path masks;
  std::string mask_pattern = kMaskPattern;
  double threshold = 0.0;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "Pixel-level TPR/FPR of thresholded heat maps");
    add_common(cmd, common);
    cmd->add_option("--heatmaps", heatmaps, "Directory of heat maps from score")->required();
    cmd->add_option("--masks", masks, "Directory of ground-truth masks")->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--mask-pattern", mask_pattern, "printf-style mask file name")
        ->capture_default_str();
    cmd->add_option("--threshold", threshold, "Detection threshold")->required();
    cmd->callback([this, cmd] { run(cmd); });
  }

  void run(const CLI::App* cmd) const {
    const auto video = load_video(heatmaps, masks, mask_pattern);
    json frames = json::array();
    PixelRates total;
    for (std::size_t k = 0; k < video.heatmaps.size(); ++k) {
      const auto& heat = video.heatmaps[k];
      const auto r = pixel_rates(threshold_map(heat, threshold), video.ground_truth[k], heat);
      json entry = rates_to_json(r);
      entry["frame"] = heat.frame_index;
      frames.push_back(entry);
      total.true_positives += r.true_positives;
      total.false_positives += r.false_positives;
      total.true_negatives += r.true_negatives;
      total.false_negatives += r.false_negatives;
    }
    if (total.true_positives + total.false_negatives > 0)
      total.tpr = static_cast<double>(total.true_positives) /
                  static_cast<double>(total.true_positives + total.false_negatives);
    if (total.false_positives + total.true_negatives > 0)
      total.fpr = static_cast<double>(total.false_positives) /
                  static_cast<double>(total.false_positives + total.true_negatives);

    make_dir(common.out);
    const fs::path path = common.out / "evaluation.json";
    {
      std::ofstream file(path);
      file << json{{"threshold", threshold}, {"total", rates_to_json(total)}, {"frames", frames}}
                  .dump(2)
           << '\n';
    }
    write_manifest(cmd, common.out, {path});
    log("TPR " + (total.tpr ? std::to_string(*total.tpr) : "n/a") + ", FPR " +
        (total.fpr ? std::to_string(*total.fpr) : "n/a"));
  }
};

struct RocCommand {
  Common common;
  std::vector<fs::path> heatmaps;
  std::vector<fs::path> masks;
  std::string mask_pattern = kMaskPattern;
  int n_thresholds = 200;
  std::string title = "ROC";

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("roc", "Pixel-level ROC curve and AUC over one or more videos");
    add_common(cmd, common);
    cmd->add_option("--heatmaps", heatmaps, "Heat map directory per video")->required();
    cmd->add_option("--masks", masks, "Ground-truth mask directory per video, same order")
        ->required();
    cmd->add_option("--mask-pattern", mask_pattern, "printf-style mask file name")
        ->capture_default_str();
    cmd->add_option("--n-thresholds", n_thresholds, "Maximum number of thresholds")
        ->check(CLI::Range(2, 1 << 30))->capture_default_str();
    cmd->add_option("--title", title, "Plot title")->capture_default_str();
    cmd->callback([this, cmd] { run(cmd); });
  }

  void run(const CLI::App* cmd) const {
    if (heatmaps.size() != masks.size())
      throw UsageError("masks", "needs one directory per --heatmaps directory");
    std::vector<VideoResult> videos;
    for (std::size_t v = 0; v < heatmaps.size(); ++v)
      videos.push_back(load_video(heatmaps[v], masks[v], mask_pattern));
    const auto curve = roc_curve(videos, n_thresholds);

    make_dir(common.out);
    std::vector<fs::path> outputs{common.out / "roc.csv", common.out / "roc.svg",
                                  common.out / "roc.json"};
    write_roc_csv(outputs[0], curve);
    write_roc_svg(outputs[1], curve, title);
    {
      std::ofstream file(outputs[2]);
      file << json{{"auc", curve.auc}, {"points", curve.points.size()}, {"videos", videos.size()}}
                  .dump(2)
           << '\n';
    }
    write_manifest(cmd, common.out, outputs, {{"auc", curve.auc}});
    log("AUC " + std::to_string(curve.auc));
  }
};

struct GradcheckCommand {
  Common common;
  std::string model = "feedforward";
  neural::GradcheckDims dims;
  std::uint64_t seed = 0;
  int seeds = 1;
  double eps = 1e-5;
  double tolerance = 1e-5;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
    add_common(cmd, common);
    cmd->add_option("--model", model, "feedforward, recurrent or both")
        ->check(CLI::IsMember({"feedforward", "recurrent", "dense", "lstm", "both"}))
        ->capture_default_str();
    cmd->add_option("--input-dim", dims.input_dim, "Input dimension K")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--hidden", dims.hidden_dim, "Hidden units H")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--steps", dims.steps, "Sequence length (recurrent)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--batch", dims.batch, "Batch size")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", seed, "First seed")->capture_default_str();
    cmd->add_option("--seeds", seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--eps", eps, "Finite-difference step")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tolerance", tolerance, "Maximum accepted relative error")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmd->callback([this, cmd] { run(cmd); });
  }

  void run(const CLI::App* cmd) const {
    std::vector<neural::ModelKind> kinds;
    if (model == "both") {
      kinds = {neural::ModelKind::Feedforward, neural::ModelKind::Recurrent};
    } else {
      kinds = {neural::parse_model_kind(model)};
    }
    json runs = json::array();
    double worst = 0.0;
    for (auto kind : kinds)
      for (int k = 0; k < seeds; ++k) {
        const auto report = neural::gradcheck(kind, dims, seed + static_cast<std::uint64_t>(k), eps);
        worst = std::max(worst, report.comparison.max_relative_error);
        runs.push_back({{"model", std::string(neural::to_string(kind))},
                        {"seed", report.seed},
                        {"parameters", report.comparison.coordinates},
                        {"max_relative_error", report.comparison.max_relative_error},
                        {"max_absolute_error", report.comparison.max_absolute_error},
                        {"worst_coordinate", report.comparison.worst_coordinate}});
      }
    const bool passed = worst < tolerance;

    make_dir(common.out);
    const fs::path path = common.out / "gradcheck.json";
    {
      std::ofstream file(path);
      file << json{{"eps", eps},
                   {"tolerance", tolerance},
                   {"max_relative_error", worst},
                   {"passed", passed},
                   {"runs", runs}}
                  .dump(2)
           << '\n';
    }
    write_manifest(cmd, common.out, {path});
    log("max relative error " + std::to_string(worst) + (passed ? " (ok)" : " (FAILED)"));
    if (!passed)
      fail(ErrorCode::InvalidParameter, "gradient check exceeded tolerance " +
                                            std::to_string(tolerance));
  }
};

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Video splicing localization: residual co-occurrence features and autoencoders",
               "vsl"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SynthCommand synth;
  ExtractCommand extract;
  TrainCommand train;
  ScoreCommand score;
  EvaluateCommand evaluate;
  RocCommand roc;
  GradcheckCommand gradcheck;
  synth.add(app);
  extract.add(app);
  train.add(app);
  score.add(app);
  evaluate.add(app);
  roc.add(app);
  gradcheck.add(app);

  try {
    const auto expanded = apply_config_file(app, args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help and version requests are successes; everything else is misuse.
    const int status = app.exit(e);
    return status == 0 ? kOk : kUsageError;
  } catch (const UsageError& e) {
    std::cerr << "vsl: usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "vsl: error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace vsl::cli
