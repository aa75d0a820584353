#pragma once

#include <Eigen/Dense>

namespace codap {

struct NnlsOptions {
  /// Stop once every inactive dual component A^T(b - Ax) is at most this.
  double dual_tolerance = 1e-10;
  /// Outer-iteration cap; 0 means 10 * number of columns.
  int max_iterations = 0;
};

struct NnlsResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double objective = 0.0;  // ||Ax - b||^2
};

/// argmin_{x >= 0} ||Ax - b||_2^2 by the Lawson-Hanson active-set method.
/// Throws NumericalFailure (carrying the last feasible iterate) when the
/// iteration cap is hit.
NnlsResult solve_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      const NnlsOptions& options = {});

}  // namespace codap
