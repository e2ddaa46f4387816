#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

#include "vsl/error.hpp"

namespace vsl::neural {

struct AdamHyper {
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected moments:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
template <typename Scalar>
class Adam {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Adam() = default;
  Adam(Eigen::Index parameter_count, AdamHyper hyper)
      : hyper_(hyper),
        first_moment_(Vector::Zero(parameter_count)),
        second_moment_(Vector::Zero(parameter_count)) {
    if (!(hyper.learning_rate > 0) || hyper.beta1 < 0 || hyper.beta1 >= 1 || hyper.beta2 < 0 ||
        hyper.beta2 >= 1 || !(hyper.epsilon > 0))
      fail(ErrorCode::InvalidParameter, "invalid Adam hyperparameters");
  }

  const AdamHyper& hyper() const { return hyper_; }
  std::int64_t steps() const { return steps_; }
  const Vector& first_moment() const { return first_moment_; }
  const Vector& second_moment() const { return second_moment_; }

  template <typename Params, typename Grads>
  void step(Eigen::MatrixBase<Params>& params, const Eigen::MatrixBase<Grads>& grads) {
    if (params.size() != first_moment_.size() || grads.size() != first_moment_.size())
      fail(ErrorCode::ShapeError, "Adam: parameter/gradient size does not match optimizer state");
    ++steps_;
    const Scalar b1 = static_cast<Scalar>(hyper_.beta1);
    const Scalar b2 = static_cast<Scalar>(hyper_.beta2);
    first_moment_ = b1 * first_moment_ + (Scalar(1) - b1) * grads;
    second_moment_ = b2 * second_moment_ + (Scalar(1) - b2) * grads.cwiseAbs2();
    const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(steps_));
    const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(steps_));
    const Scalar lr = static_cast<Scalar>(hyper_.learning_rate);
    const Scalar eps = static_cast<Scalar>(hyper_.epsilon);
    params.derived().array() -=
        lr * (first_moment_.array() / c1) / ((second_moment_.array() / c2).sqrt() + eps);
  }

 private:
  AdamHyper hyper_;
  Vector first_moment_;
  Vector second_moment_;
  std::int64_t steps_ = 0;
};

template <typename Scalar, typename Params, typename Grads>
void adam_step(Adam<Scalar>& state, Eigen::MatrixBase<Params>& params,
               const Eigen::MatrixBase<Grads>& grads) {
  state.step(params, grads);
}

}  // namespace vsl::neural
