#include "codap/svg.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <vector>

#include "codap/io.hpp"

namespace codap {

namespace {

constexpr double kPanelW = 360.0;
constexpr double kPanelH = 240.0;
constexpr double kMargin = 48.0;
constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c",
                                             "#9467bd", "#ff7f0e", "#17becf"};

std::vector<double> distinct(std::vector<double> v) {
  std::vector<double> out;
  for (double x : v) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

}  // namespace

std::string sweep_svg(const SweepResult& result) {
  std::vector<double> params, seconds, noises;
  for (const auto& c : result.cells) {
    params.push_back(c.param_value);
    seconds.push_back(c.second_value);
    noises.push_back(c.noise_level);
  }
  params = distinct(params);
  seconds = distinct(seconds);
  noises = distinct(noises);

  const double width = 2 * (kPanelW + kMargin) + kMargin;
  const double height = static_cast<double>(noises.size()) * (kPanelH + kMargin) + kMargin;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";

  auto x_of = [&](double param) {
    const auto i = static_cast<double>(std::find(params.begin(), params.end(), param) - params.begin());
    const double n = std::max<double>(1.0, static_cast<double>(params.size()) - 1.0);
    return i / n * kPanelW;
  };
  auto y_of = [](double msp) { return kPanelH - msp / 100.0 * kPanelH; };

  for (std::size_t row = 0; row < noises.size(); ++row) {
    for (int col = 0; col < 2; ++col) {
      const double ox = kMargin + col * (kPanelW + kMargin);
      const double oy = kMargin / 2 + static_cast<double>(row) * (kPanelH + kMargin);
      svg << "<g transform=\"translate(" << ox << ',' << oy << ")\">\n";
      svg << "<rect width=\"" << kPanelW << "\" height=\"" << kPanelH
          << "\" fill=\"none\" stroke=\"#444\"/>\n";
      svg << "<text x=\"4\" y=\"-4\">" << (col == 0 ? "MSP position" : "MSP shape")
          << ", noise " << format_number(noises[row]) << "</text>\n";
      for (int tick = 0; tick <= 100; tick += 25) {
        svg << "<text x=\"-6\" y=\"" << y_of(tick) + 4 << "\" text-anchor=\"end\">" << tick
            << "</text>\n";
      }
      for (double p : params) {
        svg << "<text x=\"" << x_of(p) << "\" y=\"" << kPanelH + 14
            << "\" text-anchor=\"middle\">" << format_number(p) << "</text>\n";
      }
      for (std::size_t s = 0; s < seconds.size(); ++s) {
        std::ostringstream pts;
        for (const auto& c : result.cells) {
          if (c.noise_level != noises[row] || c.second_value != seconds[s]) continue;
          pts << x_of(c.param_value) << ',' << y_of(col == 0 ? c.msp.position : c.msp.shape) << ' ';
        }
        const char* color = kColors[s % kColors.size()];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << pts.str()
            << "\"/>\n";
        svg << "<text x=\"" << kPanelW - 4 << "\" y=\"" << 14 + 12 * static_cast<double>(s)
            << "\" text-anchor=\"end\" fill=\"" << color << "\">" << result.second_name << ' '
            << format_number(seconds[s]) << "</text>\n";
      }
      svg << "</g>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace codap
