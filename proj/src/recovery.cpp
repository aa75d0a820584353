#include "codap/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "codap/error.hpp"

namespace codap {

namespace {

const std::vector<double>& normalized_data(const ScanSeries& series) {
  if (!series.normalized) throw ParameterError("scan series has not been normalized");
  return *series.normalized;
}

void check_window(const TransmissivityProfile& profile, std::size_t p, std::size_t rows,
                  std::size_t cols) {
  if (rows == 0 || cols == 0) throw ParameterError("scan and signal lengths must be >= 1");
  if (p + rows + cols - 1 > profile.size()) {
    throw ParameterError("offset places the scan window outside the profile");
  }
}

}  // namespace

NormalizationEstimate estimate_levels(const ScanSeries& series) {
  if (series.size() < 2) throw ParameterError("normalization needs at least two scan points");
  const auto [lo, hi] = std::minmax_element(series.raw.begin(), series.raw.end());
  if (!(*lo >= 0.0)) throw ParameterError("raw counts must be non-negative");
  return {*lo + 2.0 * std::sqrt(*lo), *hi - 2.0 * std::sqrt(*hi)};
}

NormalizationEstimate known_levels(double open_count, const TransmissivityProfile& raw_profile) {
  if (!(open_count > 0.0)) throw ParameterError("open count must be positive");
  return {open_count * raw_profile.min_value(), open_count * raw_profile.max_value()};
}

ScanSeries normalize(ScanSeries series) {
  const auto levels = estimate_levels(series);
  return normalize(std::move(series), levels);
}

ScanSeries normalize(ScanSeries series, const NormalizationEstimate& levels) {
  if (series.size() < 2) throw ParameterError("normalization needs at least two scan points");
  if (!(levels.mu1 > levels.mu0)) {
    throw FlatSeriesError("scan series carries no usable modulation (mu1 <= mu0)");
  }
  const double span = levels.mu1 - levels.mu0;
  std::vector<double> out(series.raw.size());
  std::transform(series.raw.begin(), series.raw.end(), out.begin(),
                 [&](double d) { return (d - levels.mu0) / span; });
  series.normalized = std::move(out);
  return series;
}

SearchRange full_search_range(std::size_t profile_size, std::size_t rows, std::size_t cols) {
  if (rows + cols - 1 > profile_size) return {0, 0};
  return {0, profile_size - rows - cols + 2};
}

PositionFit search_position(const TransmissivityProfile& profile, const ScanSeries& series,
                            const Signal& templ, std::optional<SearchRange> range) {
  const auto& d = normalized_data(series);
  const std::size_t rows = d.size();
  const std::size_t cols = templ.size();
  if (rows == 0 || cols == 0) throw ParameterError("scan and template must be non-empty");

  const SearchRange full = full_search_range(profile.size(), rows, cols);
  const SearchRange r = range.value_or(full);
  if (r.empty()) throw ParameterError("position search range is empty");
  if (r.last > full.last) throw ParameterError("position search range exceeds feasible offsets");

  // corr[k] = (A'_{first} t)-style correlation of the profile with the
  // template, shared by every candidate offset.
  const auto& a = profile.values();
  const std::size_t span = r.last - r.first + rows - 1;
  std::vector<double> corr(span);
  for (std::size_t k = 0; k < span; ++k) {
    double acc = 0.0;
    const std::size_t base = r.first + k;
    for (std::size_t n = 0; n < cols; ++n) acc += a[base + n] * templ.values[n];
    corr[k] = acc;
  }

  PositionFit best{r.first, std::numeric_limits<double>::infinity()};
  for (std::size_t p = r.first; p < r.last; ++p) {
    const double* c = corr.data() + (p - r.first);
    double res = 0.0;
    for (std::size_t m = 0; m < rows; ++m) {
      const double e = c[m] - d[m];
      res += e * e;
    }
    if (res < best.residual) best = {p, res};
  }
  return best;
}

std::vector<double> solve_signal(const TransmissivityProfile& profile, const ScanSeries& series,
                                 std::size_t p, std::size_t signal_length,
                                 const NnlsOptions& options) {
  const auto& d = normalized_data(series);
  check_window(profile, p, d.size(), signal_length);
  const auto a = build_coding_matrix(profile, p, d.size(), signal_length, true).dense();
  const Eigen::Map<const Eigen::VectorXd> b(d.data(), static_cast<Eigen::Index>(d.size()));
  const auto sol = solve_nnls(a, b, options);
  return {sol.x.data(), sol.x.data() + sol.x.size()};
}

double objective(const TransmissivityProfile& profile, const ScanSeries& series, std::size_t p,
                 const std::vector<double>& s) {
  const auto& d = normalized_data(series);
  check_window(profile, p, d.size(), s.size());
  const auto pred = build_coding_matrix(profile, p, d.size(), s.size(), true).apply(s);
  double res = 0.0;
  for (std::size_t m = 0; m < d.size(); ++m) res += (pred[m] - d[m]) * (pred[m] - d[m]);
  return res;
}

RecoveryResult recover(const TransmissivityProfile& profile, const ScanSeries& series,
                       const Signal& templ, const RecoveryOptions& options) {
  if (options.max_rounds < 1) throw ParameterError("max_rounds must be at least 1");
  normalized_data(series);

  RecoveryResult result;
  Signal current = templ;
  for (int round = 1; round <= options.max_rounds; ++round) {
    const auto fit = search_position(profile, series, current, options.range);
    if (round > 1 && fit.position == result.position) break;
    // A shape that re-searches to a worse offset cannot lower the objective.
    if (round > 1 && fit.residual >= result.residual) break;

    result.position = fit.position;
    result.signal = solve_signal(profile, series, fit.position, templ.size(), options.nnls);
    result.residual = objective(profile, series, fit.position, result.signal);
    result.iterations = round;

    current.values = result.signal;
    if (current.sum() <= 0.0) break;
  }
  return result;
}

}  // namespace codap
