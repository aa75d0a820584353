#include "codap/forward.hpp"

#include <cmath>
#include <numeric>

#include "codap/error.hpp"
#include "codap/random.hpp"

namespace codap {

namespace {

std::size_t sample_count(double width, double grid_step) {
  if (!(grid_step > 0.0)) throw ParameterError("grid step must be positive");
  if (!(width >= grid_step)) throw ParameterError("signal width must be at least one grid step");
  return static_cast<std::size_t>(std::llround(width / grid_step));
}

}  // namespace

double Signal::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

Signal make_gaussian_signal(double width, double grid_step) {
  const std::size_t n = sample_count(width, grid_step);
  const double sigma = width / 4.0;
  const double center = 0.5 * static_cast<double>(n - 1);
  Signal s{std::vector<double>(n), grid_step};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) - center) * grid_step;
    s.values[i] = std::exp(-x * x / (2.0 * sigma * sigma));
  }
  return s;
}

Signal make_boxcar_signal(double width, double grid_step) {
  return Signal{std::vector<double>(sample_count(width, grid_step), 1.0), grid_step};
}

Signal unit_sum(const Signal& signal) {
  const double total = signal.sum();
  if (!(total > 0.0)) throw DegenerateInputError("signal has zero total intensity");
  Signal out = signal;
  for (auto& v : out.values) v /= total;
  return out;
}

CodingMatrix::CodingMatrix(std::vector<double> antidiagonals, std::size_t rows,
                           std::size_t cols, std::size_t offset, bool normalized)
    : diag_(std::move(antidiagonals)),
      rows_(rows),
      cols_(cols),
      offset_(offset),
      normalized_(normalized) {
  if (rows_ == 0 || cols_ == 0) throw ParameterError("coding matrix needs M, N >= 1");
  if (diag_.size() != rows_ + cols_ - 1) {
    throw ParameterError("coding matrix needs M + N - 1 anti-diagonal values");
  }
}

Eigen::MatrixXd CodingMatrix::dense() const {
  Eigen::MatrixXd a(rows_, cols_);
  for (std::size_t m = 0; m < rows_; ++m) {
    for (std::size_t n = 0; n < cols_; ++n) {
      a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = diag_[m + n];
    }
  }
  return a;
}

std::vector<double> CodingMatrix::apply(const std::vector<double>& s) const {
  if (s.size() != cols_) throw ParameterError("signal length does not match matrix columns");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t m = 0; m < rows_; ++m) {
    double acc = 0.0;
    for (std::size_t n = 0; n < cols_; ++n) acc += diag_[m + n] * s[n];
    out[m] = acc;
  }
  return out;
}

CodingMatrix build_coding_matrix(const TransmissivityProfile& profile, std::size_t p,
                                 std::size_t rows, std::size_t cols, bool normalized) {
  if (rows == 0 || cols == 0) throw ParameterError("coding matrix needs M, N >= 1");
  if (p + rows + cols - 1 > profile.size()) {
    throw ParameterError("scan window exceeds the transmissivity profile");
  }
  const auto first = profile.values().begin() + static_cast<std::ptrdiff_t>(p);
  std::vector<double> diag(first, first + static_cast<std::ptrdiff_t>(rows + cols - 1));
  return CodingMatrix(std::move(diag), rows, cols, p, normalized);
}

ScanSeries simulate(const CodingMatrix& matrix, const Signal& signal, double peak_counts,
                    std::uint64_t seed, bool poisson) {
  if (!(peak_counts > 0.0)) throw ParameterError("peak counts must be positive");
  for (double v : signal.values) {
    if (!(v >= 0.0)) throw ParameterError("signal values must be non-negative");
  }
  const double total = signal.sum();
  if (!(total > 0.0)) throw DegenerateInputError("signal is zero; nothing to detect");

  const bool noiseless = std::isinf(peak_counts) || !poisson;
  const double scale = (std::isinf(peak_counts) ? 1.0 : peak_counts) / total;

  ScanSeries series;
  series.step = signal.grid_step;
  series.raw = matrix.apply(signal.values);
  for (auto& v : series.raw) v *= scale;
  if (noiseless) return series;

  CounterRng rng(seed);
  for (auto& v : series.raw) v = static_cast<double>(sample_poisson(v, rng));
  return series;
}

}  // namespace codap
