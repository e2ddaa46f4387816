#pragma once

#include <Eigen/Core>
#include <cmath>
#include <utility>

#include "vsl/error.hpp"
#include "vsl/neural/activation.hpp"
#include "vsl/neural/loss.hpp"
#include "vsl/rng.hpp"

namespace vsl::neural {

/// Single-hidden-layer autoencoder
///
///   z     = phi1(A1 x + b1)      A1: H x K
///   x_hat = phi2(A2 z + b2)      A2: K x H
///
/// All parameters live in one flat vector laid out as A1, b1, A2, b2 with
/// matrices in column-major order, so optimizers and gradient checks can
/// treat the model as a point in R^n.
template <typename Scalar_>
class DenseAutoencoder {
 public:
  using Scalar = Scalar_;
  using Index = Eigen::Index;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  struct Forward {
    Matrix hidden;  // H x B
    Matrix output;  // K x B
  };

  DenseAutoencoder() = default;

  DenseAutoencoder(Index input_dim, Index hidden_dim, Activation hidden = Activation::Tanh,
                   Activation output = Activation::Identity)
      : input_dim_(input_dim), hidden_dim_(hidden_dim), hidden_act_(hidden), output_act_(output) {
    if (input_dim < 1 || hidden_dim < 1)
      fail(ErrorCode::InvalidParameter, "autoencoder dimensions must be positive");
    params_ = Vector::Zero(parameter_count());
  }

  Index input_dim() const { return input_dim_; }
  Index hidden_dim() const { return hidden_dim_; }
  Activation hidden_activation() const { return hidden_act_; }
  Activation output_activation() const { return output_act_; }
  Index parameter_count() const { return 2 * input_dim_ * hidden_dim_ + hidden_dim_ + input_dim_; }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  MatrixMap encoder_weights() { return {params_.data(), hidden_dim_, input_dim_}; }
  ConstMatrixMap encoder_weights() const { return {params_.data(), hidden_dim_, input_dim_}; }
  VectorMap encoder_bias() { return {params_.data() + offset_b1(), hidden_dim_}; }
  ConstVectorMap encoder_bias() const { return {params_.data() + offset_b1(), hidden_dim_}; }
  MatrixMap decoder_weights() { return {params_.data() + offset_a2(), input_dim_, hidden_dim_}; }
  ConstMatrixMap decoder_weights() const {
    return {params_.data() + offset_a2(), input_dim_, hidden_dim_};
  }
  VectorMap decoder_bias() { return {params_.data() + offset_b2(), input_dim_}; }
  ConstVectorMap decoder_bias() const { return {params_.data() + offset_b2(), input_dim_}; }

  /// Weights uniform in [-s, s] with s = scale / sqrt(fan_in); biases zero.
  void initialize(Rng& rng, Scalar scale = Scalar(1)) {
    params_.setZero();
    const Scalar s1 = scale / std::sqrt(static_cast<Scalar>(input_dim_));
    const Scalar s2 = scale / std::sqrt(static_cast<Scalar>(hidden_dim_));
    for (auto& w : encoder_weights().reshaped()) w = static_cast<Scalar>(rng.uniform(-s1, s1));
    for (auto& w : decoder_weights().reshaped()) w = static_cast<Scalar>(rng.uniform(-s2, s2));
  }

  template <typename Derived>
  Forward forward(const Eigen::MatrixBase<Derived>& inputs) const {
    check_inputs(inputs.rows());
    Forward f;
    f.hidden = activate(hidden_act_, (encoder_weights() * inputs).colwise() + encoder_bias());
    f.output = activate(output_act_, (decoder_weights() * f.hidden).colwise() + decoder_bias());
    return f;
  }

  /// Mean reconstruction loss over the columns of `inputs`.
  template <typename Derived>
  Scalar loss(const Eigen::MatrixBase<Derived>& inputs) const {
    if (inputs.cols() == 0) fail(ErrorCode::InvalidParameter, "empty minibatch");
    return reconstruction_loss(inputs, forward(inputs).output);
  }

  /// Per-column reconstruction loss.
  template <typename Derived>
  Vector column_losses(const Eigen::MatrixBase<Derived>& inputs) const {
    const auto f = forward(inputs);
    return (inputs - f.output).colwise().squaredNorm().transpose() /
           static_cast<Scalar>(input_dim_);
  }

  /// Gradient of loss(inputs) with respect to the flat parameter vector.
  template <typename Derived>
  Vector loss_gradient(const Eigen::MatrixBase<Derived>& inputs, Scalar* loss_out = nullptr) const {
    if (inputs.cols() == 0) fail(ErrorCode::InvalidParameter, "empty minibatch");
    const auto f = forward(inputs);
    const Matrix diff = f.output - inputs;
    if (loss_out) *loss_out = diff.squaredNorm() / static_cast<Scalar>(diff.size());

    const Matrix d_out = (Scalar(2) / static_cast<Scalar>(diff.size())) * diff;
    const Matrix d_pre2 = d_out.cwiseProduct(activation_slope(output_act_, f.output));
    const Matrix d_pre1 =
        (decoder_weights().transpose() * d_pre2).cwiseProduct(activation_slope(hidden_act_, f.hidden));

    Vector grad(parameter_count());
    MatrixMap(grad.data(), hidden_dim_, input_dim_).noalias() = d_pre1 * inputs.transpose();
    VectorMap(grad.data() + offset_b1(), hidden_dim_) = d_pre1.rowwise().sum();
    MatrixMap(grad.data() + offset_a2(), input_dim_, hidden_dim_).noalias() =
        d_pre2 * f.hidden.transpose();
    VectorMap(grad.data() + offset_b2(), input_dim_) = d_pre2.rowwise().sum();
    return grad;
  }

 private:
  Index offset_b1() const { return hidden_dim_ * input_dim_; }
  Index offset_a2() const { return offset_b1() + hidden_dim_; }
  Index offset_b2() const { return offset_a2() + input_dim_ * hidden_dim_; }

  void check_inputs(Index rows) const {
    if (rows != input_dim_)
      fail(ErrorCode::ShapeError, "input dimension " + std::to_string(rows) +
                                      " does not match model dimension " +
                                      std::to_string(input_dim_));
  }

  Index input_dim_ = 0;
  Index hidden_dim_ = 0;
  Activation hidden_act_ = Activation::Tanh;
  Activation output_act_ = Activation::Identity;
  Vector params_;
};

using DenseAutoencoderd = DenseAutoencoder<double>;

/// (z, x_hat) for one input vector.
template <typename Scalar, typename Derived>
auto dense_forward(const DenseAutoencoder<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  using Vector = typename DenseAutoencoder<Scalar>::Vector;
  if (x.cols() != 1) fail(ErrorCode::ShapeError, "dense_forward expects a single column");
  auto f = model.forward(x);
  return std::pair<Vector, Vector>(f.hidden.col(0), f.output.col(0));
}

template <typename Scalar, typename Derived>
auto dense_gradients(const DenseAutoencoder<Scalar>& model,
                     const Eigen::MatrixBase<Derived>& minibatch) {
  return model.loss_gradient(minibatch);
}

}  // namespace vsl::neural
