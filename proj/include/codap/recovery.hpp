#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "codap/aperture.hpp"
#include "codap/forward.hpp"
#include "codap/nnls.hpp"

namespace codap {

/// Mean counts recorded behind fully blocked (mu0) and fully open (mu1) bits.
struct NormalizationEstimate {
  double mu0 = 0.0;
  double mu1 = 1.0;
};

/// Two-sigma Poisson estimators from the series extrema:
/// mu0 = d_min + 2 sqrt(d_min), mu1 = d_max - 2 sqrt(d_max).
NormalizationEstimate estimate_levels(const ScanSeries& series);

/// Exact levels when the open-aperture count is known (noiseless
/// simulation): mu0 = open * min(a), mu1 = open * max(a) of the raw profile.
NormalizationEstimate known_levels(double open_count, const TransmissivityProfile& raw_profile);

/// Fills series.normalized with (d - mu0) / (mu1 - mu0) using the
/// estimated levels. Throws FlatSeriesError when mu1 <= mu0.
ScanSeries normalize(ScanSeries series);
ScanSeries normalize(ScanSeries series, const NormalizationEstimate& levels);

/// Half-open interval of candidate offsets [first, last).
struct SearchRange {
  std::size_t first = 0;
  std::size_t last = 0;

  bool empty() const noexcept { return last <= first; }
};

/// Every offset p with p + M + N - 1 <= profile length.
SearchRange full_search_range(std::size_t profile_size, std::size_t rows, std::size_t cols);

struct PositionFit {
  std::size_t position = 0;
  double residual = 0.0;
};

/// Exhaustive argmin over p of ||A'_p t - d'||^2. Ties go to the smallest p.
/// `profile` is expected to be normalized already.
PositionFit search_position(const TransmissivityProfile& profile, const ScanSeries& series,
                            const Signal& templ, std::optional<SearchRange> range = {});

/// Non-negative least squares signal of length `signal_length` at offset p.
std::vector<double> solve_signal(const TransmissivityProfile& profile, const ScanSeries& series,
                                 std::size_t p, std::size_t signal_length,
                                 const NnlsOptions& options = {});

/// ||A'_p s - d'||^2.
double objective(const TransmissivityProfile& profile, const ScanSeries& series, std::size_t p,
                 const std::vector<double>& s);

struct RecoveryOptions {
  int max_rounds = 3;
  std::optional<SearchRange> range;
  NnlsOptions nnls;
};

struct RecoveryResult {
  std::size_t position = 0;
  std::vector<double> signal;
  double residual = 0.0;
  int iterations = 0;  // alternating rounds run
};

/// Position search with the template, NNLS for the shape, then alternate
/// (re-search with the recovered shape, re-solve) until the position is
/// stable or max_rounds is reached.
RecoveryResult recover(const TransmissivityProfile& profile, const ScanSeries& series,
                       const Signal& templ, const RecoveryOptions& options = {});

}  // namespace codap
