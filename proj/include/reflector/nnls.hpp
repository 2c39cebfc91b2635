#pragma once

#include <Eigen/Core>

namespace refl {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual;  // |A x - b|
};

/// Lawson-Hanson active-set nonnegative least squares: min |A x - b| subject to x >= 0.
/// The columns selected by the passive set at termination are linearly independent.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace refl
