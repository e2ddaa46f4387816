#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "vsl/error.hpp"
#include "vsl/neural/adam.hpp"
#include "vsl/neural/dense_autoencoder.hpp"
#include "vsl/neural/lstm_autoencoder.hpp"
#include "vsl/rng.hpp"

namespace vsl::neural {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 128;  // feature vectors (dense) or sequences (recurrent)
  std::uint64_t seed = 0;
  int unroll_length = 25;
  double init_scale = 1.0;
};

template <typename Model>
struct TrainResult {
  Model model;
  /// Mean minibatch loss over each epoch, measured before each update.
  std::vector<double> epoch_losses;
};

// Seed streams: initialization and minibatch shuffling never share draws.
inline constexpr std::uint64_t kInitStream = 0;
inline constexpr std::uint64_t kShuffleStream = 1;

template <typename Scalar = double>
DenseAutoencoder<Scalar> make_dense_autoencoder(Eigen::Index input_dim, Eigen::Index hidden_dim,
                                                const TrainConfig& config) {
  DenseAutoencoder<Scalar> model(input_dim, hidden_dim);
  Rng rng(derive_seed(config.seed, kInitStream));
  model.initialize(rng, static_cast<Scalar>(config.init_scale));
  return model;
}

template <typename Scalar = double>
LstmAutoencoder<Scalar> make_lstm_autoencoder(Eigen::Index input_dim, Eigen::Index hidden_dim,
                                              const TrainConfig& config) {
  LstmAutoencoder<Scalar> model(input_dim, hidden_dim, config.unroll_length);
  Rng rng(derive_seed(config.seed, kInitStream));
  model.initialize(rng, static_cast<Scalar>(config.init_scale));
  return model;
}

/// Splits the columns of a K x T sequence into consecutive windows of
/// `length` steps; the last window keeps whatever remains.
template <typename Derived>
std::vector<typename Derived::PlainObject> split_windows(const Eigen::MatrixBase<Derived>& sequence,
                                                         Eigen::Index length) {
  if (length < 1) fail(ErrorCode::InvalidParameter, "window length must be >= 1");
  std::vector<typename Derived::PlainObject> windows;
  for (Eigen::Index t = 0; t < sequence.cols(); t += length)
    windows.emplace_back(sequence.middleCols(t, std::min(length, sequence.cols() - t)));
  return windows;
}

namespace detail {

inline void check_train_config(const TrainConfig& config) {
  if (config.epochs < 0 || config.batch_size < 1 || config.unroll_length < 1 ||
      !(config.init_scale > 0))
    fail(ErrorCode::InvalidParameter, "invalid training configuration");
}

inline std::vector<Eigen::Index> iota_indices(Eigen::Index n) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

}  // namespace detail

/// Minibatch Adam on the columns of `data` (K x N), reshuffled every epoch.
template <typename Scalar>
TrainResult<DenseAutoencoder<Scalar>> train(
    DenseAutoencoder<Scalar> model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& data, const TrainConfig& config,
    const AdamHyper& hyper) {
  detail::check_train_config(config);
  if (data.cols() == 0) fail(ErrorCode::InvalidParameter, "empty training set");
  if (data.rows() != model.input_dim())
    fail(ErrorCode::ShapeError, "training features do not match the model dimension");

  Adam<Scalar> optimizer(model.parameter_count(), hyper);
  Rng rng(derive_seed(config.seed, kShuffleStream));
  auto order = detail::iota_indices(data.cols());
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  TrainResult<DenseAutoencoder<Scalar>> result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t n = std::min(batch_size, order.size() - start);
      const std::vector<Eigen::Index> picked(order.begin() + static_cast<std::ptrdiff_t>(start),
                                             order.begin() + static_cast<std::ptrdiff_t>(start + n));
      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> batch = data(Eigen::all, picked);
      Scalar loss = 0;
      const auto grad = model.loss_gradient(batch, &loss);
      optimizer.step(model.parameters(), grad);
      epoch_loss += static_cast<double>(loss) * static_cast<double>(n);
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  result.model = std::move(model);
  return result;
}

/// Minibatch Adam over whole sequences (each K x T_i). Sequences of equal
/// length inside a minibatch are batched together; the minibatch gradient is
/// the mean over sequences of each sequence's loss gradient.
template <typename Scalar>
TrainResult<LstmAutoencoder<Scalar>> train(
    LstmAutoencoder<Scalar> model,
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& sequences,
    const TrainConfig& config, const AdamHyper& hyper) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  detail::check_train_config(config);
  if (sequences.empty()) fail(ErrorCode::InvalidParameter, "empty training set");
  for (const auto& s : sequences)
    if (s.rows() != model.input_dim() || s.cols() == 0)
      fail(ErrorCode::ShapeError, "training sequence does not match the model dimension");

  Adam<Scalar> optimizer(model.parameter_count(), hyper);
  Rng rng(derive_seed(config.seed, kShuffleStream));
  auto order = detail::iota_indices(static_cast<Eigen::Index>(sequences.size()));
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  TrainResult<LstmAutoencoder<Scalar>> result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t n = std::min(batch_size, order.size() - start);
      std::map<Eigen::Index, std::vector<Eigen::Index>> by_length;
      for (std::size_t k = start; k < start + n; ++k)
        by_length[sequences[static_cast<std::size_t>(order[k])].cols()].push_back(order[k]);

      Vector grad = Vector::Zero(model.parameter_count());
      double batch_loss = 0.0;
      for (const auto& [length, members] : by_length) {
        typename LstmAutoencoder<Scalar>::Steps steps(static_cast<std::size_t>(length));
        for (Eigen::Index t = 0; t < length; ++t) {
          Matrix& x = steps[static_cast<std::size_t>(t)];
          x.resize(model.input_dim(), static_cast<Eigen::Index>(members.size()));
          for (std::size_t b = 0; b < members.size(); ++b)
            x.col(static_cast<Eigen::Index>(b)) =
                sequences[static_cast<std::size_t>(members[b])].col(t);
        }
        Scalar loss = 0;
        const Scalar weight = static_cast<Scalar>(members.size()) / static_cast<Scalar>(n);
        grad += weight * model.loss_gradient(steps, &loss);
        batch_loss += static_cast<double>(weight * loss);
      }
      optimizer.step(model.parameters(), grad);
      epoch_loss += batch_loss * static_cast<double>(n);
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  result.model = std::move(model);
  return result;
}

}  // namespace vsl::neural
