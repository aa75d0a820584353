#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "codap/forward.hpp"
#include "codap/recovery.hpp"
#include "codap/sweeps.hpp"

namespace codap {

/// Filesystem failure while reading or writing results.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (as opposed to a bad config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using HeaderLines = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal form; "inf" for infinity.
std::string format_number(double v);

/// Writes to a sibling temporary file and renames it into place, so the
/// final path never holds a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string sweep_csv(const SweepResult& result, const HeaderLines& header);

std::string scan_series_csv(const ScanSeries& series, const HeaderLines& header);

struct PixelSeries {
  std::string pixel_id;
  std::vector<double> positions_um;
  ScanSeries series;
};

/// Rows `pixel_id,scan_index,position_um,counts`. Pixels keep the order of
/// their first row; positions must be strictly increasing and equidistant
/// to within 1e-6 um.
std::vector<PixelSeries> read_pixel_file(std::istream& in, const std::string& source);
std::string pixel_file_csv(const std::vector<PixelSeries>& pixels, const HeaderLines& header);

enum class PixelStatus { Ok, Flat, Failed };

struct PixelRecovery {
  std::string pixel_id;
  PixelStatus status = PixelStatus::Ok;
  double p_hat_um = 0.0;
  RecoveryResult result;
};

/// `pixel_id,p_hat_um,residual,rounds,s_0..s_{N-1},status`.
std::string recovery_csv(const std::vector<PixelRecovery>& rows, std::size_t signal_length,
                         const HeaderLines& header);

}  // namespace codap
