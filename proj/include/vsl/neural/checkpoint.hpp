#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "vsl/features.hpp"
#include "vsl/neural/adam.hpp"
#include "vsl/neural/dense_autoencoder.hpp"
#include "vsl/neural/gradcheck.hpp"
#include "vsl/neural/lstm_autoencoder.hpp"
#include "vsl/neural/train.hpp"

namespace vsl::neural {

using AnyModel = std::variant<DenseAutoencoderd, LstmAutoencoderd>;

inline ModelKind kind_of(const AnyModel& model) {
  return std::holds_alternative<DenseAutoencoderd>(model) ? ModelKind::Feedforward
                                                          : ModelKind::Recurrent;
}

inline Eigen::Index input_dim_of(const AnyModel& model) {
  return std::visit([](const auto& m) { return m.input_dim(); }, model);
}

/// A trained model plus everything needed to reproduce it and to check that
/// features fed to it were produced the same way.
struct Checkpoint {
  AnyModel model;
  FeatureConfig features;
  TrainConfig training;
  AdamHyper adam;
  std::vector<double> epoch_losses;
  /// Frame indices of the pristine frames the model was fitted on.
  std::vector<long> training_frames;
};

/// Checkpoint JSON, version 1:
///
///   {
///     "format": "vsl-checkpoint", "version": 1,
///     "model_kind": "feedforward" | "recurrent",
///     "dimensions": {"input": K, "hidden": H, "unroll_length": T},
///     "activations": {"hidden": "tanh", "output": "identity"},   // feedforward
///     "features": {"patch", "stride", "q", "T", "symmetry", "dim"},
///     "training": {"epochs", "batch_size", "seed", "unroll_length", "init_scale"},
///     "adam": {"learning_rate", "beta1", "beta2", "epsilon"},
///     "epoch_losses": [...],
///     "training_frames": [frame indices],
///     "parameters": {name: {"shape": [rows, cols], "values": [...]}}
///   }
///
/// Parameter values are row-major. Feedforward names: encoder_weights (H x K),
/// encoder_bias (H x 1), decoder_weights (K x H), decoder_bias (K x 1).
/// Recurrent names: input_weights (4H x K), recurrent_weights (4H x H),
/// gate_bias (4H x 1), decoder_weights (K x H), decoder_bias (K x 1); gate
/// row blocks are ordered input, forget, output, candidate.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vsl::neural
