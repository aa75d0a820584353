#include "codap/aperture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "codap/error.hpp"

namespace codap {

namespace {

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

// Cell counts are computed from lengths that are usually exact multiples of
// the step; the slack keeps 80.0000000001 from becoming 81 cells.
std::size_t cells_for(double length, double step) {
  if (length <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(length / step - 1e-9));
}

}  // namespace

ApertureGeometry::ApertureGeometry(Pattern pattern, double bit_size_zero, double bit_size_one,
                                   double thickness)
    : pattern_(std::move(pattern)),
      bit_size_zero_(bit_size_zero),
      bit_size_one_(bit_size_one),
      thickness_(thickness) {
  if (!(bit_size_zero_ > 0.0) || !(bit_size_one_ > 0.0)) {
    throw ParameterError("bit sizes must be strictly positive");
  }
  if (!(thickness_ > 0.0)) throw ParameterError("aperture thickness must be strictly positive");
  if (pattern_.size() == 0) throw ParameterError("aperture pattern is empty");

  edges_.resize(pattern_.size() + 1, 0.0);
  covered_.resize(pattern_.size() + 1, 0.0);
  for (std::size_t k = 0; k < pattern_.size(); ++k) {
    const bool bar = pattern_[k] == 1;
    const double len = bar ? bit_size_one_ : bit_size_zero_;
    edges_[k + 1] = edges_[k] + len;
    covered_[k + 1] = covered_[k] + (bar ? len : 0.0);
  }
}

double ApertureGeometry::bar_coverage(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= edges_.back()) return covered_.back();
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const auto k = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return covered_[k] + (pattern_[k] == 1 ? x - edges_[k] : 0.0);
}

bool ApertureGeometry::inside_bar(double z) const {
  if (z < 0.0 || z >= edges_.back()) return false;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), z);
  const auto k = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return pattern_[k] == 1;
}

void OpticalContext::validate() const {
  if (!(attenuation_per_um >= 0.0)) {
    throw ParameterError("attenuation coefficient must be non-negative");
  }
  if (!(incidence_angle_deg >= 0.0) || !(incidence_angle_deg < 90.0)) {
    throw ParameterError("incidence angle must be in [0, 90) degrees");
  }
}

TransmissivityProfile::TransmissivityProfile(std::vector<double> values, double grid_step,
                                             double origin)
    : values_(std::move(values)), grid_step_(grid_step), origin_(origin) {
  if (!(grid_step_ > 0.0)) throw ParameterError("grid step must be positive");
}

double TransmissivityProfile::min_value() const {
  if (values_.empty()) throw DegenerateInputError("empty profile");
  return *std::min_element(values_.begin(), values_.end());
}

double TransmissivityProfile::max_value() const {
  if (values_.empty()) throw DegenerateInputError("empty profile");
  return *std::max_element(values_.begin(), values_.end());
}

TransmissivityProfile TransmissivityProfile::normalized() const {
  const double lo = min_value();
  const double hi = max_value();
  if (!(hi > lo)) throw DegenerateInputError("constant profile cannot be normalized");
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [&](double v) { return (v - lo) / (hi - lo); });
  return TransmissivityProfile(std::move(out), grid_step_, origin_);
}

std::ptrdiff_t TransmissivityProfile::index_of(double z) const {
  return static_cast<std::ptrdiff_t>(std::llround((z - origin_) / grid_step_));
}

double shear_width(const ApertureGeometry& geometry, const OpticalContext& context) {
  return geometry.thickness() * std::tan(to_radians(context.incidence_angle_deg));
}

double absorber_path_length(const ApertureGeometry& geometry, double entry_z,
                            const OpticalContext& context) {
  context.validate();
  if (context.incidence_angle_deg == 0.0) {
    return geometry.inside_bar(entry_z) ? geometry.thickness() : 0.0;
  }
  const double theta = to_radians(context.incidence_angle_deg);
  const double span = geometry.thickness() * std::tan(theta);
  const double covered = geometry.bar_coverage(entry_z + span) - geometry.bar_coverage(entry_z);
  return covered / std::sin(theta);
}

double transmissivity(const ApertureGeometry& geometry, double entry_z,
                      const OpticalContext& context) {
  const double path = absorber_path_length(geometry, entry_z, context);
  if (path <= 0.0) return 1.0;
  return std::exp(-context.attenuation_per_um * path);
}

TransmissivityProfile build_profile(const ApertureGeometry& geometry,
                                    const OpticalContext& context, double grid_step,
                                    int oversample, double trailing_margin_um) {
  if (!(grid_step > 0.0)) throw ParameterError("grid step must be positive");
  if (oversample < 1) throw ParameterError("oversample must be at least 1");
  if (!(trailing_margin_um >= 0.0)) throw ParameterError("trailing margin must be non-negative");
  context.validate();

  const std::size_t lead = cells_for(shear_width(geometry, context), grid_step);
  const std::size_t body = cells_for(geometry.total_length() + trailing_margin_um, grid_step);
  const double origin = -static_cast<double>(lead) * grid_step;

  std::vector<double> values(lead + body);
  const double sub = grid_step / oversample;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cell_start = origin + static_cast<double>(i) * grid_step;
    double acc = 0.0;
    for (int j = 0; j < oversample; ++j) {
      acc += transmissivity(geometry, cell_start + (j + 0.5) * sub, context);
    }
    values[i] = acc / oversample;
  }
  return TransmissivityProfile(std::move(values), grid_step, origin);
}

}  // namespace codap
