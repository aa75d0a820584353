#pragma once

#include <cstddef>
#include <vector>

#include "codap/codes.hpp"

namespace codap {

/// Physical barcode aperture: a pattern extruded to a given thickness, with
/// separate physical lengths for open (0) and bar (1) bits. Lengths in um.
class ApertureGeometry {
 public:
  ApertureGeometry(Pattern pattern, double bit_size_zero, double bit_size_one, double thickness);

  const Pattern& pattern() const noexcept { return pattern_; }
  double bit_size_zero() const noexcept { return bit_size_zero_; }
  double bit_size_one() const noexcept { return bit_size_one_; }
  double thickness() const noexcept { return thickness_; }
  double total_length() const noexcept { return edges_.back(); }

  /// Start coordinate of bit k; `bit_start(size())` is the total length.
  double bit_start(std::size_t k) const { return edges_[k]; }

  /// Measure of [0, x] covered by bars. Constant outside the aperture.
  double bar_coverage(double x) const;

  /// Whether the point z lies inside a bar (bits are half-open intervals).
  bool inside_bar(double z) const;

 private:
  Pattern pattern_;
  double bit_size_zero_;
  double bit_size_one_;
  double thickness_;
  std::vector<double> edges_;
  std::vector<double> covered_;  // bar measure in [0, edges_[k]]
};

struct OpticalContext {
  double energy_kev = 0.0;
  double attenuation_per_um = 0.0;  // linear attenuation of the bar material
  double incidence_angle_deg = 0.0;

  void validate() const;
};

/// Cell-averaged transmissivity a_i on a regular grid. Cell i spans
/// [origin + i*grid_step, origin + (i+1)*grid_step).
class TransmissivityProfile {
 public:
  TransmissivityProfile() = default;
  TransmissivityProfile(std::vector<double> values, double grid_step, double origin);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double grid_step() const noexcept { return grid_step_; }
  double origin() const noexcept { return origin_; }

  double min_value() const;
  double max_value() const;

  /// Min-max rescaled copy with values spanning exactly [0, 1].
  /// Throws DegenerateInputError for a constant profile.
  TransmissivityProfile normalized() const;

  /// Index of the cell containing coordinate z (rounded to nearest cell start).
  std::ptrdiff_t index_of(double z) const;

 private:
  std::vector<double> values_;
  double grid_step_ = 1.0;
  double origin_ = 0.0;
};

/// Length of a ray's path through the bars. The ray enters the top face at
/// `entry_z`, and crosses the thickness t while moving t*tan(theta) along z.
double absorber_path_length(const ApertureGeometry& geometry, double entry_z,
                            const OpticalContext& context);

/// exp(-mu * path), with zero path giving exactly 1 even for mu = inf.
double transmissivity(const ApertureGeometry& geometry, double entry_z,
                      const OpticalContext& context);

inline constexpr int kDefaultOversample = 16;

/// Samples transmissivity at `oversample` points per cell and stores cell
/// averages. Covers the shear margin before the aperture, the aperture
/// itself, and `trailing_margin_um` of open space after it.
TransmissivityProfile build_profile(const ApertureGeometry& geometry,
                                    const OpticalContext& context, double grid_step,
                                    int oversample = kDefaultOversample,
                                    double trailing_margin_um = 0.0);

/// Lateral shear t*tan(theta) of a ray crossing the aperture.
double shear_width(const ApertureGeometry& geometry, const OpticalContext& context);

}  // namespace codap
