#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "vsl/error.hpp"
#include "vsl/neural/activation.hpp"
#include "vsl/neural/loss.hpp"
#include "vsl/rng.hpp"

namespace vsl::neural {

/// LSTM encoder (K -> H) with an affine decoder (H -> K), reconstructing the
/// current input at every step:
///
///   i = sigma(W_i x + U_i h + b_i)      f = sigma(W_f x + U_f h + b_f)
///   o = sigma(W_o x + U_o h + b_o)      g = tanh(W_g x + U_g h + b_g)
///   c' = f * c + i * g                  h' = o * tanh(c')
///   x_hat = V h' + d
///
/// Flat parameter layout: W (4H x K), U (4H x H), b (4H), V (K x H), d (K),
/// matrices column-major, gate blocks stacked in the order i, f, o, g.
template <typename Scalar_>
class LstmAutoencoder {
 public:
  using Scalar = Scalar_;
  using Index = Eigen::Index;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;
  /// Time-major batch: steps[t] is K x B, column b belongs to sequence b.
  using Steps = std::vector<Matrix>;

  enum Gate : Index { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };

  struct State {
    Matrix h;  // H x B
    Matrix c;  // H x B
  };

  LstmAutoencoder() = default;

  LstmAutoencoder(Index input_dim, Index hidden_dim, Index unroll_length = 25)
      : input_dim_(input_dim), hidden_dim_(hidden_dim), unroll_length_(unroll_length) {
    if (input_dim < 1 || hidden_dim < 1)
      fail(ErrorCode::InvalidParameter, "autoencoder dimensions must be positive");
    if (unroll_length < 1) fail(ErrorCode::InvalidParameter, "unroll length must be >= 1");
    params_ = Vector::Zero(parameter_count());
  }

  Index input_dim() const { return input_dim_; }
  Index hidden_dim() const { return hidden_dim_; }
  Index unroll_length() const { return unroll_length_; }
  Index parameter_count() const {
    const Index g = 4 * hidden_dim_;
    return g * input_dim_ + g * hidden_dim_ + g + input_dim_ * hidden_dim_ + input_dim_;
  }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  MatrixMap input_weights() { return {params_.data(), 4 * hidden_dim_, input_dim_}; }
  ConstMatrixMap input_weights() const { return {params_.data(), 4 * hidden_dim_, input_dim_}; }
  MatrixMap recurrent_weights() { return {params_.data() + offset_u(), 4 * hidden_dim_, hidden_dim_}; }
  ConstMatrixMap recurrent_weights() const {
    return {params_.data() + offset_u(), 4 * hidden_dim_, hidden_dim_};
  }
  VectorMap gate_bias() { return {params_.data() + offset_b(), 4 * hidden_dim_}; }
  ConstVectorMap gate_bias() const { return {params_.data() + offset_b(), 4 * hidden_dim_}; }
  MatrixMap decoder_weights() { return {params_.data() + offset_v(), input_dim_, hidden_dim_}; }
  ConstMatrixMap decoder_weights() const {
    return {params_.data() + offset_v(), input_dim_, hidden_dim_};
  }
  VectorMap decoder_bias() { return {params_.data() + offset_d(), input_dim_}; }
  ConstVectorMap decoder_bias() const { return {params_.data() + offset_d(), input_dim_}; }

  /// Gate weights uniform in [-s, s] with s = scale / sqrt(K + H), decoder
  /// with s = scale / sqrt(H); biases zero except the forget gate at 1.
  void initialize(Rng& rng, Scalar scale = Scalar(1)) {
    params_.setZero();
    const Scalar sg = scale / std::sqrt(static_cast<Scalar>(input_dim_ + hidden_dim_));
    const Scalar sv = scale / std::sqrt(static_cast<Scalar>(hidden_dim_));
    for (auto& w : input_weights().reshaped()) w = static_cast<Scalar>(rng.uniform(-sg, sg));
    for (auto& w : recurrent_weights().reshaped()) w = static_cast<Scalar>(rng.uniform(-sg, sg));
    for (auto& w : decoder_weights().reshaped()) w = static_cast<Scalar>(rng.uniform(-sv, sv));
    gate_bias().segment(kForget * hidden_dim_, hidden_dim_).setOnes();
  }

  State zero_state(Index batch) const {
    return {Matrix::Zero(hidden_dim_, batch), Matrix::Zero(hidden_dim_, batch)};
  }

  /// One cell update for a batch of inputs (K x B).
  template <typename Derived>
  State step(const Eigen::MatrixBase<Derived>& x, const State& state) const {
    Cache cache;
    return step_cached(x, state, cache);
  }

  template <typename Derived>
  Matrix decode(const Eigen::MatrixBase<Derived>& h) const {
    return (decoder_weights() * h).colwise() + decoder_bias();
  }

  /// Reconstructions for every step, starting from the zero state.
  Steps forward(const Steps& steps, State* final_state = nullptr) const {
    check_steps(steps);
    State state = zero_state(steps.front().cols());
    Steps out;
    out.reserve(steps.size());
    for (const auto& x : steps) {
      state = step(x, state);
      out.push_back(decode(state.h));
    }
    if (final_state) *final_state = std::move(state);
    return out;
  }

  /// Mean over sequences of (mean over steps of the reconstruction loss).
  Scalar loss(const Steps& steps) const {
    const auto out = forward(steps);
    Scalar total = 0;
    for (std::size_t t = 0; t < steps.size(); ++t) total += (out[t] - steps[t]).squaredNorm();
    return total / static_cast<Scalar>(element_count(steps));
  }

  /// Backpropagation through time over the whole window.
  Vector loss_gradient(const Steps& steps, Scalar* loss_out = nullptr) const {
    check_steps(steps);
    const Index batch = steps.front().cols();
    const std::size_t length = steps.size();
    const Index h = hidden_dim_;

    std::vector<Cache> caches(length);
    std::vector<State> states;
    states.reserve(length + 1);
    states.push_back(zero_state(batch));
    Steps residuals(length);
    Scalar total = 0;
    for (std::size_t t = 0; t < length; ++t) {
      states.push_back(step_cached(steps[t], states[t], caches[t]));
      residuals[t] = decode(states[t + 1].h) - steps[t];
      total += residuals[t].squaredNorm();
    }
    const Scalar n = static_cast<Scalar>(element_count(steps));
    if (loss_out) *loss_out = total / n;

    Vector grad = Vector::Zero(parameter_count());
    MatrixMap dW(grad.data(), 4 * h, input_dim_);
    MatrixMap dU(grad.data() + offset_u(), 4 * h, h);
    VectorMap db(grad.data() + offset_b(), 4 * h);
    MatrixMap dV(grad.data() + offset_v(), input_dim_, h);
    VectorMap dd(grad.data() + offset_d(), input_dim_);

    Matrix dh_next = Matrix::Zero(h, batch);
    Matrix dc_next = Matrix::Zero(h, batch);
    Matrix d_pre(4 * h, batch);
    for (std::size_t t = length; t-- > 0;) {
      const Cache& k = caches[t];
      const Matrix d_out = (Scalar(2) / n) * residuals[t];
      dV.noalias() += d_out * states[t + 1].h.transpose();
      dd += d_out.rowwise().sum();

      const Matrix dh = decoder_weights().transpose() * d_out + dh_next;
      const Matrix dc = dh.cwiseProduct(k.o).cwiseProduct(
                            (Scalar(1) - k.tanh_c.array().square()).matrix()) +
                        dc_next;
      const auto di = dc.cwiseProduct(k.g);
      const auto df = dc.cwiseProduct(states[t].c);
      const auto d_o = dh.cwiseProduct(k.tanh_c);
      const auto dg = dc.cwiseProduct(k.i);

      d_pre.middleRows(kInput * h, h) = di.cwiseProduct(activation_slope(Activation::Sigmoid, k.i));
      d_pre.middleRows(kForget * h, h) = df.cwiseProduct(activation_slope(Activation::Sigmoid, k.f));
      d_pre.middleRows(kOutput * h, h) = d_o.cwiseProduct(activation_slope(Activation::Sigmoid, k.o));
      d_pre.middleRows(kCandidate * h, h) = dg.cwiseProduct(activation_slope(Activation::Tanh, k.g));

      dW.noalias() += d_pre * steps[t].transpose();
      dU.noalias() += d_pre * states[t].h.transpose();
      db += d_pre.rowwise().sum();
      dh_next.noalias() = recurrent_weights().transpose() * d_pre;
      dc_next = dc.cwiseProduct(k.f);
    }
    return grad;
  }

 private:
  struct Cache {
    Matrix i, f, o, g, tanh_c;
  };

  template <typename Derived>
  State step_cached(const Eigen::MatrixBase<Derived>& x, const State& state, Cache& k) const {
    if (x.rows() != input_dim_)
      fail(ErrorCode::ShapeError, "input dimension " + std::to_string(x.rows()) +
                                      " does not match model dimension " +
                                      std::to_string(input_dim_));
    if (state.h.rows() != hidden_dim_ || state.c.rows() != hidden_dim_ ||
        state.h.cols() != x.cols() || state.c.cols() != x.cols())
      fail(ErrorCode::ShapeError, "LSTM state shape does not match the input batch");
    const Index h = hidden_dim_;
    const Matrix pre =
        ((input_weights() * x + recurrent_weights() * state.h).colwise() + gate_bias()).eval();
    k.i = activate(Activation::Sigmoid, pre.middleRows(kInput * h, h));
    k.f = activate(Activation::Sigmoid, pre.middleRows(kForget * h, h));
    k.o = activate(Activation::Sigmoid, pre.middleRows(kOutput * h, h));
    k.g = activate(Activation::Tanh, pre.middleRows(kCandidate * h, h));
    State next;
    next.c = k.f.cwiseProduct(state.c) + k.i.cwiseProduct(k.g);
    k.tanh_c = next.c.array().tanh().matrix();
    next.h = k.o.cwiseProduct(k.tanh_c);
    return next;
  }

  void check_steps(const Steps& steps) const {
    if (steps.empty()) fail(ErrorCode::InvalidParameter, "empty sequence");
    const Index batch = steps.front().cols();
    if (batch == 0) fail(ErrorCode::InvalidParameter, "empty minibatch");
    for (const auto& x : steps)
      if (x.rows() != input_dim_ || x.cols() != batch)
        fail(ErrorCode::ShapeError, "sequence step shape does not match the model");
  }

  static Index element_count(const Steps& steps) {
    return static_cast<Index>(steps.size()) * steps.front().size();
  }

  Index offset_u() const { return 4 * hidden_dim_ * input_dim_; }
  Index offset_b() const { return offset_u() + 4 * hidden_dim_ * hidden_dim_; }
  Index offset_v() const { return offset_b() + 4 * hidden_dim_; }
  Index offset_d() const { return offset_v() + input_dim_ * hidden_dim_; }

  Index input_dim_ = 0;
  Index hidden_dim_ = 0;
  Index unroll_length_ = 25;
  Vector params_;
};

using LstmAutoencoderd = LstmAutoencoder<double>;

/// Result of running one sequence (K x T, one column per step).
template <typename Scalar>
struct RecurrentOutput {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> reconstructions;  // K x T
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> step_losses;                   // T
  typename LstmAutoencoder<Scalar>::State final_state;
  Scalar loss = 0;  // mean of step_losses
};

template <typename Scalar, typename Derived>
typename LstmAutoencoder<Scalar>::State lstm_step(
    const LstmAutoencoder<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
    const typename LstmAutoencoder<Scalar>::State& state) {
  return model.step(x, state);
}

template <typename Scalar, typename Derived>
RecurrentOutput<Scalar> rae_forward(const LstmAutoencoder<Scalar>& model,
                                    const Eigen::MatrixBase<Derived>& sequence) {
  if (sequence.cols() == 0) fail(ErrorCode::InvalidParameter, "empty sequence");
  typename LstmAutoencoder<Scalar>::Steps steps;
  steps.reserve(static_cast<std::size_t>(sequence.cols()));
  for (Eigen::Index t = 0; t < sequence.cols(); ++t) steps.emplace_back(sequence.col(t));
  RecurrentOutput<Scalar> out;
  const auto recon = model.forward(steps, &out.final_state);
  out.reconstructions.resize(sequence.rows(), sequence.cols());
  out.step_losses.resize(sequence.cols());
  for (Eigen::Index t = 0; t < sequence.cols(); ++t) {
    out.reconstructions.col(t) = recon[static_cast<std::size_t>(t)];
    out.step_losses(t) = reconstruction_loss(sequence.col(t), out.reconstructions.col(t));
  }
  out.loss = out.step_losses.mean();
  return out;
}

}  // namespace vsl::neural
