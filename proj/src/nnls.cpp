#include "codap/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "codap/error.hpp"

namespace codap {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Unconstrained least squares restricted to the passive columns; the
// remaining entries of the returned vector are zero.
VectorXd passive_solve(const MatrixXd& a, const VectorXd& b, const std::vector<Index>& passive) {
  MatrixXd sub(a.rows(), static_cast<Index>(passive.size()));
  for (std::size_t k = 0; k < passive.size(); ++k) sub.col(static_cast<Index>(k)) = a.col(passive[k]);
  const VectorXd z_sub = sub.completeOrthogonalDecomposition().solve(b);
  VectorXd z = VectorXd::Zero(a.cols());
  for (std::size_t k = 0; k < passive.size(); ++k) z(passive[k]) = z_sub(static_cast<Index>(k));
  return z;
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

NnlsResult solve_nnls(const MatrixXd& a, const VectorXd& b, const NnlsOptions& options) {
  if (a.rows() != b.size()) throw ParameterError("NNLS: rows of A must match length of b");
  if (a.cols() == 0) throw ParameterError("NNLS: A has no columns");

  const Index n = a.cols();
  const int cap = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * n);

  VectorXd x = VectorXd::Zero(n);
  std::vector<bool> in_passive(static_cast<std::size_t>(n), false);
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);
  VectorXd w = a.transpose() * (b - a * x);
  int iterations = 0;

  while (true) {
    Index t = -1;
    double best = options.dual_tolerance;
    for (Index j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (!in_passive[uj] && !blocked[uj] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) break;
    if (++iterations > cap) {
      throw NumericalFailure("NNLS did not converge within the iteration cap", to_std(x));
    }
    in_passive[static_cast<std::size_t>(t)] = true;

    bool first_pass = true;
    while (true) {
      std::vector<Index> passive;
      for (Index j = 0; j < n; ++j) {
        if (in_passive[static_cast<std::size_t>(j)]) passive.push_back(j);
      }
      const VectorXd z = passive_solve(a, b, passive);

      // A freshly added column that comes back non-positive would cycle
      // forever; drop it until the iterate moves.
      if (first_pass && z(t) <= 0.0) {
        in_passive[static_cast<std::size_t>(t)] = false;
        blocked[static_cast<std::size_t>(t)] = true;
        break;
      }
      first_pass = false;

      bool feasible = true;
      double alpha = std::numeric_limits<double>::infinity();
      Index leaving = -1;
      for (Index j : passive) {
        if (z(j) <= 0.0) {
          feasible = false;
          const double denom = x(j) - z(j);
          const double ratio = denom > 0.0 ? x(j) / denom : 0.0;
          if (ratio < alpha) {
            alpha = ratio;
            leaving = j;
          }
        }
      }
      if (feasible) {
        x = z;
        std::fill(blocked.begin(), blocked.end(), false);
        break;
      }
      x += alpha * (z - x);
      x(leaving) = 0.0;
      for (Index j : passive) {
        if (x(j) <= 0.0) {
          x(j) = 0.0;
          in_passive[static_cast<std::size_t>(j)] = false;
        }
      }
      std::fill(blocked.begin(), blocked.end(), false);
    }
    w = a.transpose() * (b - a * x);
  }

  NnlsResult result;
  result.x = x;
  result.iterations = iterations;
  result.objective = (a * x - b).squaredNorm();
  return result;
}

}  // namespace codap
