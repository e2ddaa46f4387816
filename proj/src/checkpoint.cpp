#include "vsl/neural/checkpoint.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"

namespace vsl::neural {

using nlohmann::json;

namespace {

constexpr int kVersion = 1;

template <typename Derived>
json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  return json{{"shape", {m.rows(), m.cols()}}, {"values", values}};
}

template <typename Derived>
void matrix_from_json(const json& params, const std::string& name, Eigen::MatrixBase<Derived>&& m) {
  if (!params.contains(name)) fail(ErrorCode::UnsupportedFormat, "checkpoint lacks parameter " + name);
  const auto& entry = params.at(name);
  const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
  const auto values = entry.at("values").get<std::vector<double>>();
  if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols() ||
      values.size() != static_cast<std::size_t>(m.size()))
    fail(ErrorCode::ShapeError, "checkpoint parameter " + name + " has the wrong shape");
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = values[k++];
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& cp) {
  json doc;
  doc["format"] = "vsl-checkpoint";
  doc["version"] = kVersion;
  doc["model_kind"] = std::string(to_string(kind_of(cp.model)));
  doc["features"] = {{"patch", cp.features.geometry.patch},
                     {"stride", cp.features.geometry.stride},
                     {"q", cp.features.quantizer.step},
                     {"T", cp.features.quantizer.truncation},
                     {"symmetry", std::string(to_string(cp.features.symmetry))},
                     {"dim", input_dim_of(cp.model)}};
  doc["training"] = {{"epochs", cp.training.epochs},
                     {"batch_size", cp.training.batch_size},
                     {"seed", cp.training.seed},
                     {"unroll_length", cp.training.unroll_length},
                     {"init_scale", cp.training.init_scale}};
  doc["adam"] = {{"learning_rate", cp.adam.learning_rate},
                 {"beta1", cp.adam.beta1},
                 {"beta2", cp.adam.beta2},
                 {"epsilon", cp.adam.epsilon}};
  doc["epoch_losses"] = cp.epoch_losses;
  doc["training_frames"] = cp.training_frames;

  if (const auto* dense = std::get_if<DenseAutoencoderd>(&cp.model)) {
    doc["dimensions"] = {{"input", dense->input_dim()}, {"hidden", dense->hidden_dim()}};
    doc["activations"] = {{"hidden", std::string(to_string(dense->hidden_activation()))},
                          {"output", std::string(to_string(dense->output_activation()))}};
    doc["parameters"] = {{"encoder_weights", matrix_to_json(dense->encoder_weights())},
                         {"encoder_bias", matrix_to_json(dense->encoder_bias())},
                         {"decoder_weights", matrix_to_json(dense->decoder_weights())},
                         {"decoder_bias", matrix_to_json(dense->decoder_bias())}};
  } else {
    const auto& lstm = std::get<LstmAutoencoderd>(cp.model);
    doc["dimensions"] = {{"input", lstm.input_dim()},
                         {"hidden", lstm.hidden_dim()},
                         {"unroll_length", lstm.unroll_length()}};
    doc["parameters"] = {{"input_weights", matrix_to_json(lstm.input_weights())},
                         {"recurrent_weights", matrix_to_json(lstm.recurrent_weights())},
                         {"gate_bias", matrix_to_json(lstm.gate_bias())},
                         {"decoder_weights", matrix_to_json(lstm.decoder_weights())},
                         {"decoder_bias", matrix_to_json(lstm.decoder_bias())}};
  }
  return doc.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::UnsupportedFormat, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", "") != "vsl-checkpoint")
      fail(ErrorCode::UnsupportedFormat, "not a checkpoint document");
    if (doc.at("version").get<int>() != kVersion)
      fail(ErrorCode::UnsupportedFormat, "unsupported checkpoint version");

    Checkpoint cp;
    const auto& f = doc.at("features");
    cp.features.geometry.patch = f.at("patch").get<Eigen::Index>();
    cp.features.geometry.stride = f.at("stride").get<Eigen::Index>();
    cp.features.quantizer.step = f.at("q").get<double>();
    cp.features.quantizer.truncation = f.at("T").get<int>();
    cp.features.symmetry = parse_symmetry(f.at("symmetry").get<std::string>());

    const auto& t = doc.at("training");
    cp.training.epochs = t.at("epochs").get<int>();
    cp.training.batch_size = t.at("batch_size").get<int>();
    cp.training.seed = t.at("seed").get<std::uint64_t>();
    cp.training.unroll_length = t.at("unroll_length").get<int>();
    cp.training.init_scale = t.at("init_scale").get<double>();

    const auto& a = doc.at("adam");
    cp.adam.learning_rate = a.at("learning_rate").get<double>();
    cp.adam.beta1 = a.at("beta1").get<double>();
    cp.adam.beta2 = a.at("beta2").get<double>();
    cp.adam.epsilon = a.at("epsilon").get<double>();
    cp.epoch_losses = doc.at("epoch_losses").get<std::vector<double>>();
    cp.training_frames = doc.at("training_frames").get<std::vector<long>>();

    const auto& dims = doc.at("dimensions");
    const auto input = dims.at("input").get<Eigen::Index>();
    const auto hidden = dims.at("hidden").get<Eigen::Index>();
    if (f.at("dim").get<Eigen::Index>() != input)
      fail(ErrorCode::ShapeError, "feature dimension does not match model input dimension");
    const auto& params = doc.at("parameters");

    if (parse_model_kind(doc.at("model_kind").get<std::string>()) == ModelKind::Feedforward) {
      const auto& act = doc.at("activations");
      DenseAutoencoderd model(input, hidden, parse_activation(act.at("hidden").get<std::string>()),
                              parse_activation(act.at("output").get<std::string>()));
      matrix_from_json(params, "encoder_weights", model.encoder_weights());
      matrix_from_json(params, "encoder_bias", model.encoder_bias());
      matrix_from_json(params, "decoder_weights", model.decoder_weights());
      matrix_from_json(params, "decoder_bias", model.decoder_bias());
      cp.model = std::move(model);
    } else {
      LstmAutoencoderd model(input, hidden, dims.at("unroll_length").get<Eigen::Index>());
      matrix_from_json(params, "input_weights", model.input_weights());
      matrix_from_json(params, "recurrent_weights", model.recurrent_weights());
      matrix_from_json(params, "gate_bias", model.gate_bias());
      matrix_from_json(params, "decoder_weights", model.decoder_weights());
      matrix_from_json(params, "decoder_bias", model.decoder_bias());
      cp.model = std::move(model);
    }
    return cp;
  } catch (const json::exception& e) {
    fail(ErrorCode::UnsupportedFormat, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::NotFound, "cannot write " + path.string());
  out << checkpoint_to_json(checkpoint) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::NotFound, "cannot open " + path.string());
  return checkpoint_from_json(
      std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
}

}  // namespace vsl::neural
