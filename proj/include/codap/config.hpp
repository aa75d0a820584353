#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "codap/sweeps.hpp"

namespace codap {

/// Invalid configuration. `where` names the file/line or section.key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Flat key-value experiment description with [sections]. Every key is
/// optional and falls back to the defaults below.
struct ExperimentConfig {
  // [aperture]
  int order = 8;
  std::optional<std::string> pattern_bits;
  double bit_size_zero_um = 10.0;
  double bit_size_one_um = 10.0;
  double thickness_um = 10.0;

  // [optics]
  std::optional<double> mu_per_um;
  std::optional<std::filesystem::path> energy_table;
  double energy_kev = 10.0;
  std::vector<double> energies_kev;
  double incidence_angle_deg = 0.0;

  // [grid]
  double grid_step_um = 1.0;
  int oversample = kDefaultOversample;

  // [signal]
  double width_um = 10.0;
  TemplateKind template_kind = TemplateKind::Gaussian;
  std::optional<double> template_width_um;

  // [scan]
  int scan_bits = 8;
  std::vector<double> noise_levels{10.0, 100.0};
  int replicates = 30;
  int quick_replicates = 5;
  std::uint64_t seed = 1;

  // [recovery]
  int max_rounds = 3;
  std::optional<double> search_halfwidth_um;
  std::optional<double> search_lo_um;
  std::optional<double> search_hi_um;

  // [sweep]
  SweepKind sweep = SweepKind::Bsr;
  std::vector<double> values;
  std::vector<double> angles_deg{0.0, 10.0, 20.0, 40.0};

  // [criteria]
  SuccessCriteria criteria;

  // [output]
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> svg;

  /// Every key = value pair as read, in file order, for result headers.
  std::vector<std::pair<std::string, std::string>> echo;
  std::filesystem::path base_dir;

  Pattern pattern() const;
  ApertureGeometry geometry() const;
  double mu_for(double energy_kev) const;
  double template_width() const { return template_width_um.value_or(width_um); }
};

ExperimentConfig parse_config(std::istream& in, const std::string& source,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Energy to attenuation table: lines of `energy_kev,mu_per_um`, '#' comments.
std::vector<EnergyPoint> load_energy_table(const std::filesystem::path& path);

struct RunOverrides {
  bool quick = false;
  bool noiseless = false;
  std::optional<std::uint64_t> seed;
};

SweepConfig make_sweep_config(const ExperimentConfig& config, const RunOverrides& overrides);

}  // namespace codap
