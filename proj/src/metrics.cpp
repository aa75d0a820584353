#include "codap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "codap/error.hpp"

namespace codap {

void SuccessCriteria::validate() const {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(position_margin_bits >= 0.0)) throw ParameterError("position margin must be >= 0");
}

double relative_error(const std::vector<double>& estimate, const std::vector<double>& truth) {
  if (estimate.size() != truth.size()) throw ParameterError("signal lengths differ");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  if (!(den > 0.0)) throw DegenerateInputError("true signal is zero");
  return std::sqrt(num / den);
}

TrialOutcome score(const RecoveryResult& result, const GroundTruth& truth,
                   const SuccessCriteria& criteria, double bit_size_um, double grid_step_um,
                   std::uint64_t q) {
  criteria.validate();
  if (result.signal.size() != truth.signal.size()) {
    throw ParameterError("recovered and true signals have different lengths");
  }
  const double offset = std::fabs(static_cast<double>(result.position) -
                                  static_cast<double>(truth.position)) * grid_step_um;
  TrialOutcome out;
  out.q = q;
  // Small slack so a margin of exactly one bit is not lost to rounding.
  out.position_success = offset <= criteria.position_margin_bits * bit_size_um + 1e-9 ? 1 : 0;
  out.signal_success =
      out.position_success && relative_error(result.signal, truth.signal) < criteria.epsilon ? 1
                                                                                             : 0;
  return out;
}

MspPair msp(std::span<const TrialOutcome> outcomes) {
  if (outcomes.empty()) throw ParameterError("MSP of an empty trial set");
  double pos = 0.0;
  double shape = 0.0;
  for (const auto& o : outcomes) {
    pos += o.position_success;
    shape += o.signal_success;
  }
  const auto k = static_cast<double>(outcomes.size());
  return {100.0 * pos / k, 100.0 * shape / k};
}

double msp_standard_error(double msp_value, std::size_t k) {
  if (k == 0) throw ParameterError("standard error needs K >= 1");
  const double p = msp_value / 100.0;
  return 100.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(k));
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("spearman needs two equal-length samples of size >= 2");
  }
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace codap
