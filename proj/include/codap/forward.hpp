#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "codap/aperture.hpp"

namespace codap {

/// Discretized beam footprint on the aperture plane.
struct Signal {
  std::vector<double> values;
  double grid_step = 1.0;

  std::size_t size() const noexcept { return values.size(); }
  double sum() const;
};

/// Gaussian truncated to [-width/2, width/2], sigma = width/4, peak 1,
/// sampled at N = round(width/grid_step) cell centers.
Signal make_gaussian_signal(double width, double grid_step);

/// Flat window of N = round(width/grid_step) ones.
Signal make_boxcar_signal(double width, double grid_step);

/// Copy rescaled to unit sum, the scale of a signal recovered from
/// normalized data. Throws DegenerateInputError for an all-zero signal.
Signal unit_sum(const Signal& signal);

/// Coding matrix A_p: entry (m, n) is profile[p + m + n]. Only the
/// M + N - 1 distinct anti-diagonal values are stored.
class CodingMatrix {
 public:
  CodingMatrix(std::vector<double> antidiagonals, std::size_t rows, std::size_t cols,
               std::size_t offset, bool normalized);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t offset() const noexcept { return offset_; }
  bool normalized() const noexcept { return normalized_; }

  double operator()(std::size_t m, std::size_t n) const { return diag_[m + n]; }

  Eigen::MatrixXd dense() const;
  std::vector<double> apply(const std::vector<double>& s) const;

 private:
  std::vector<double> diag_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t offset_;
  bool normalized_;
};

CodingMatrix build_coding_matrix(const TransmissivityProfile& profile, std::size_t p,
                                 std::size_t rows, std::size_t cols, bool normalized = false);

struct ScanSeries {
  std::vector<double> raw;
  double step = 1.0;
  std::optional<std::vector<double>> normalized;

  std::size_t size() const noexcept { return raw.size(); }
};

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Scan series for signal s under matrix A. Intensities are scaled so that
/// a fully open window records `peak_counts` (sum(s) maps to peak_counts),
/// then each point is drawn from Poisson(I_m) using a stream keyed by `seed`.
/// With poisson = false the scaled intensities are returned as-is. The
/// kNoiseless sentinel returns noiseless intensities with open count 1.
ScanSeries simulate(const CodingMatrix& matrix, const Signal& signal, double peak_counts,
                    std::uint64_t seed, bool poisson = true);

}  // namespace codap
