#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "codap/recovery.hpp"

namespace codap {

struct SuccessCriteria {
  double epsilon = 0.02;             // relative l2 tolerance on the shape
  double position_margin_bits = 1.0;

  void validate() const;
};

struct GroundTruth {
  std::size_t position = 0;    // profile index
  std::vector<double> signal;  // in the units recovered from normalized data
};

struct TrialOutcome {
  int position_success = 0;
  int signal_success = 0;
  std::uint64_t q = 0;
  bool failed = false;  // flat series or solver failure; scored as 0
};

/// Position succeeds when |p_hat - p*| * grid_step <= margin * bit_size.
/// Shape succeeds when the position does and ||s_hat - s|| / ||s|| < epsilon.
TrialOutcome score(const RecoveryResult& result, const GroundTruth& truth,
                   const SuccessCriteria& criteria, double bit_size_um, double grid_step_um,
                   std::uint64_t q = 0);

double relative_error(const std::vector<double>& estimate, const std::vector<double>& truth);

struct MspPair {
  double position = 0.0;
  double shape = 0.0;
};

/// 100 * mean success, for position and shape independently.
MspPair msp(std::span<const TrialOutcome> outcomes);

/// Binomial standard error of an MSP value over K trials, in points.
double msp_standard_error(double msp_value, std::size_t k);

/// Spearman rank correlation (average ranks for ties). Returns 0 when either
/// input is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace codap
