#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "vsl/error.hpp"

namespace vsl::neural {

struct GradientComparison {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  Eigen::Index worst_coordinate = -1;
  Eigen::Index coordinates = 0;
};

/// Compares model.loss_gradient(data) with central differences of
/// model.loss(data), coordinate by coordinate. Relative error is
/// |a - n| / max(|a|, |n|, 1e-8).
template <typename Model, typename Data>
GradientComparison compare_with_finite_differences(Model model, const Data& data, double eps) {
  if (!(eps > 0)) fail(ErrorCode::InvalidParameter, "finite-difference step must be positive");
  using Scalar = typename Model::Scalar;
  const auto analytic = model.loss_gradient(data);
  auto& theta = model.parameters();

  GradientComparison result;
  result.coordinates = theta.size();
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const Scalar saved = theta(k);
    theta(k) = saved + static_cast<Scalar>(eps);
    const double up = static_cast<double>(model.loss(data));
    theta(k) = saved - static_cast<Scalar>(eps);
    const double down = static_cast<double>(model.loss(data));
    theta(k) = saved;

    const double numeric = (up - down) / (2.0 * eps);
    const double a = static_cast<double>(analytic(k));
    const double abs_err = std::abs(a - numeric);
    const double rel_err = abs_err / std::max({std::abs(a), std::abs(numeric), 1e-8});
    result.max_absolute_error = std::max(result.max_absolute_error, abs_err);
    if (result.worst_coordinate < 0 || rel_err > result.max_relative_error) {
      result.max_relative_error = rel_err;
      result.worst_coordinate = k;
    }
  }
  return result;
}

enum class ModelKind { Feedforward, Recurrent };

inline std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::Feedforward ? "feedforward" : "recurrent";
}

inline ModelKind parse_model_kind(std::string_view name) {
  if (name == "feedforward" || name == "dense") return ModelKind::Feedforward;
  if (name == "recurrent" || name == "lstm") return ModelKind::Recurrent;
  fail(ErrorCode::InvalidParameter, "unknown model kind '" + std::string(name) + "'");
}

struct GradcheckDims {
  Eigen::Index input_dim = 10;   // K
  Eigen::Index hidden_dim = 4;   // H
  Eigen::Index steps = 5;        // T (recurrent only)
  Eigen::Index batch = 3;
};

struct GradcheckReport {
  ModelKind kind = ModelKind::Feedforward;
  GradcheckDims dims;
  std::uint64_t seed = 0;
  double eps = 0.0;
  GradientComparison comparison;
};

/// Randomly initialized small model and random data from `seed`, in double
/// precision. Dense models use tanh hidden and identity output activations.
GradcheckReport gradcheck(ModelKind kind, const GradcheckDims& dims, std::uint64_t seed,
                          double eps = 1e-5);

}  // namespace vsl::neural
