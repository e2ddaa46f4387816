#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>

#include "vsl/error.hpp"

namespace vsl::neural {

enum class Activation { Identity, Tanh, Sigmoid, Relu };

constexpr std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Relu: return "relu";
  }
  return "identity";
}

inline Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::Identity, Activation::Tanh, Activation::Sigmoid, Activation::Relu})
    if (name == to_string(a)) return a;
  fail(ErrorCode::InvalidParameter, "unknown activation '" + std::string(name) + "'");
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return Scalar(1) / (Scalar(1) + (-x).exp());
}

template <typename Derived>
typename Derived::PlainObject activate(Activation a, const Eigen::MatrixBase<Derived>& pre) {
  using Scalar = typename Derived::Scalar;
  switch (a) {
    case Activation::Tanh: return pre.array().tanh().matrix();
    case Activation::Sigmoid: return sigmoid(pre.array()).matrix();
    case Activation::Relu: return pre.array().max(Scalar(0)).matrix();
    case Activation::Identity: break;
  }
  return pre;
}

/// Derivative expressed through the activation's output y = phi(pre).
template <typename Derived>
typename Derived::PlainObject activation_slope(Activation a, const Eigen::MatrixBase<Derived>& y) {
  using Plain = typename Derived::PlainObject;
  using Scalar = typename Derived::Scalar;
  switch (a) {
    case Activation::Tanh: return (Scalar(1) - y.array().square()).matrix();
    case Activation::Sigmoid: return (y.array() * (Scalar(1) - y.array())).matrix();
    case Activation::Relu: return (y.array() > Scalar(0)).template cast<Scalar>().matrix();
    case Activation::Identity: break;
  }
  return Plain::Ones(y.rows(), y.cols());
}

}  // namespace vsl::neural
