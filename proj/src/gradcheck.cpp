#include "vsl/neural/gradcheck.hpp"

#include "vsl/neural/dense_autoencoder.hpp"
#include "vsl/neural/lstm_autoencoder.hpp"
#include "vsl/rng.hpp"

namespace vsl::neural {

GradcheckReport gradcheck(ModelKind kind, const GradcheckDims& dims, std::uint64_t seed,
                          double eps) {
  if (!(eps > 0)) fail(ErrorCode::InvalidParameter, "finite-difference step must be positive");
  if (dims.input_dim < 1 || dims.hidden_dim < 1 || dims.steps < 1 || dims.batch < 1)
    fail(ErrorCode::InvalidParameter, "gradcheck dimensions must be positive");

  GradcheckReport report{kind, dims, seed, eps, {}};
  Rng rng(seed);
  auto random_matrix = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (auto& v : m.reshaped()) v = rng.uniform(-1.0, 1.0);
    return m;
  };

  if (kind == ModelKind::Feedforward) {
    DenseAutoencoderd model(dims.input_dim, dims.hidden_dim);
    model.initialize(rng);
    // Non-zero biases so their gradients are exercised away from the origin.
    for (auto& b : model.encoder_bias()) b = rng.uniform(-0.5, 0.5);
    for (auto& b : model.decoder_bias()) b = rng.uniform(-0.5, 0.5);
    const Eigen::MatrixXd data = random_matrix(dims.input_dim, dims.batch);
    report.comparison = compare_with_finite_differences(model, data, eps);
  } else {
    LstmAutoencoderd model(dims.input_dim, dims.hidden_dim, dims.steps);
    model.initialize(rng);
    for (auto& b : model.gate_bias()) b += rng.uniform(-0.5, 0.5);
    for (auto& b : model.decoder_bias()) b = rng.uniform(-0.5, 0.5);
    LstmAutoencoderd::Steps data;
    for (Eigen::Index t = 0; t < dims.steps; ++t)
      data.push_back(random_matrix(dims.input_dim, dims.batch));
    report.comparison = compare_with_finite_differences(model, data, eps);
  }
  return report;
}

}  // namespace vsl::neural
