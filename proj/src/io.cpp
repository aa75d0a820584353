#include "codap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <unistd.h>

namespace codap {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const auto dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) throw IoError("output directory does not exist: " + dir.string());
  const auto tmp = dir / ("." + path.filename().string() + ".partial." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move results into " + path.string());
  }
}

namespace {

void write_header(std::ostream& out, const HeaderLines& header) {
  for (const auto& [k, v] : header) out << "# " << k << " = " << v << '\n';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw FormatError(where + ": expected a number, got '" + text + "'");
  }
  return v;
}

const char* status_name(PixelStatus s) {
  switch (s) {
    case PixelStatus::Ok: return "ok";
    case PixelStatus::Flat: return "flat";
    case PixelStatus::Failed: return "failed";
  }
  return "failed";
}

}  // namespace

std::string sweep_csv(const SweepResult& result, const HeaderLines& header) {
  std::ostringstream out;
  write_header(out, header);
  const bool with_stats = result.kind == SweepKind::Patterning;
  out << "param_name,param_value,energy_kev_or_angle_deg,noise_level,msp_position,msp_shape,k,stderr";
  if (with_stats) out << ",zeros_fraction,bit_flips";
  out << '\n';
  for (const auto& c : result.cells) {
    out << result.param_name << ',' << format_number(c.param_value) << ','
        << format_number(c.second_value) << ',' << format_number(c.noise_level) << ','
        << format_number(c.msp.position) << ',' << format_number(c.msp.shape) << ',' << c.k << ','
        << format_number(c.stderr_points);
    if (with_stats && c.stats) {
      out << ',' << format_number(c.stats->zeros_fraction) << ',' << c.stats->bit_flips;
    }
    out << '\n';
  }
  return out.str();
}

std::string scan_series_csv(const ScanSeries& series, const HeaderLines& header) {
  std::ostringstream out;
  write_header(out, header);
  out << "scan_index,position_um,counts\n";
  for (std::size_t m = 0; m < series.raw.size(); ++m) {
    out << m << ',' << format_number(static_cast<double>(m) * series.step) << ','
        << format_number(series.raw[m]) << '\n';
  }
  return out.str();
}

std::vector<PixelSeries> read_pixel_file(std::istream& in, const std::string& source) {
  std::vector<PixelSeries> pixels;
  std::map<std::string, std::size_t> index;
  std::vector<long long> last_scan_index;
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto where = source + ":" + std::to_string(lineno);
    const auto f = split_csv(line);
    if (f.size() != 4) throw FormatError(where + ": expected 4 columns");
    if (!saw_header && f[0] == "pixel_id") {
      saw_header = true;
      continue;
    }
    saw_header = true;
    if (f[0].empty()) throw FormatError(where + ": empty pixel_id");

    auto [it, fresh] = index.try_emplace(f[0], pixels.size());
    if (fresh) {
      pixels.push_back(PixelSeries{f[0], {}, {}});
      last_scan_index.push_back(-1);
    }
    auto& px = pixels[it->second];
    const double scan_index = to_double(f[1], where);
    const double position = to_double(f[2], where);
    const double counts = to_double(f[3], where);
    if (scan_index != std::floor(scan_index) ||
        static_cast<long long>(scan_index) <= last_scan_index[it->second]) {
      throw FormatError(where + ": scan_index must be an increasing integer per pixel");
    }
    if (!(counts >= 0.0) || !std::isfinite(counts)) {
      throw FormatError(where + ": counts must be finite and non-negative");
    }
    last_scan_index[it->second] = static_cast<long long>(scan_index);
    px.positions_um.push_back(position);
    px.series.raw.push_back(counts);
  }
  if (pixels.empty()) throw FormatError(source + ": no pixel rows");

  constexpr double kTolerance = 1e-6;
  for (auto& px : pixels) {
    const auto& pos = px.positions_um;
    if (pos.size() < 2) throw FormatError(source + ": pixel " + px.pixel_id + " has fewer than 2 points");
    const double step = pos[1] - pos[0];
    if (!(step > 0.0)) throw FormatError(source + ": pixel " + px.pixel_id + " positions not increasing");
    for (std::size_t i = 1; i < pos.size(); ++i) {
      if (std::fabs((pos[i] - pos[i - 1]) - step) > kTolerance) {
        throw FormatError(source + ": pixel " + px.pixel_id + " positions are not equidistant");
      }
    }
    px.series.step = step;
  }
  return pixels;
}

std::string pixel_file_csv(const std::vector<PixelSeries>& pixels, const HeaderLines& header) {
  std::ostringstream out;
  write_header(out, header);
  out << "pixel_id,scan_index,position_um,counts\n";
  for (const auto& px : pixels) {
    for (std::size_t m = 0; m < px.series.raw.size(); ++m) {
      out << px.pixel_id << ',' << m << ',' << format_number(px.positions_um[m]) << ','
          << format_number(px.series.raw[m]) << '\n';
    }
  }
  return out.str();
}

std::string recovery_csv(const std::vector<PixelRecovery>& rows, std::size_t signal_length,
                         const HeaderLines& header) {
  std::ostringstream out;
  write_header(out, header);
  out << "pixel_id,p_hat_um,residual,rounds";
  for (std::size_t n = 0; n < signal_length; ++n) out << ",s_" << n;
  out << ",status\n";
  for (const auto& r : rows) {
    out << r.pixel_id;
    if (r.status == PixelStatus::Ok) {
      out << ',' << format_number(r.p_hat_um) << ',' << format_number(r.result.residual) << ','
          << r.result.iterations;
      for (std::size_t n = 0; n < signal_length; ++n) {
        out << ',' << (n < r.result.signal.size() ? format_number(r.result.signal[n]) : "");
      }
    } else {
      out << ",,,";
      for (std::size_t n = 0; n < signal_length; ++n) out << ',';
    }
    out << ',' << status_name(r.status) << '\n';
  }
  return out.str();
}

}  // namespace codap
