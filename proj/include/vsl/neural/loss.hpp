#pragma once

#include <Eigen/Core>

#include "vsl/error.hpp"

namespace vsl::neural {

/// Mean over entries of (x - x_hat)^2. Works column-wise on batches too,
/// in which case it is the mean over all entries.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar reconstruction_loss(const Eigen::MatrixBase<DerivedA>& x,
                                              const Eigen::MatrixBase<DerivedB>& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols())
    fail(ErrorCode::ShapeError, "reconstruction_loss: operand shapes differ");
  if (x.size() == 0) fail(ErrorCode::ShapeError, "reconstruction_loss: empty operands");
  return (x - x_hat).squaredNorm() / static_cast<typename DerivedA::Scalar>(x.size());
}

}  // namespace vsl::neural
