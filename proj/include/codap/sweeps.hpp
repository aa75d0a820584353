#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codap/aperture.hpp"
#include "codap/codes.hpp"
#include "codap/metrics.hpp"

namespace codap {

enum class TemplateKind { Gaussian, Boxcar };

Signal make_template(TemplateKind kind, double width, double grid_step);

/// Scan points for a scan in which every one of the `signal_cells` footprint
/// cells crosses `scan_length_um` of aperture: length/step + N - 1.
std::size_t scan_points(double scan_length_um, double grid_step_um, std::size_t signal_cells);

/// Everything needed to run the Monte-Carlo trials of one sweep cell.
struct CellSpec {
  Pattern pattern = generate_de_bruijn(8);
  double bit_size_zero_um = 10.0;
  double bit_size_one_um = 10.0;
  double thickness_um = 10.0;
  OpticalContext optics;
  double grid_step_um = 1.0;
  int oversample = kDefaultOversample;

  double signal_width_um = 10.0;
  TemplateKind template_kind = TemplateKind::Gaussian;
  double template_width_um = 10.0;

  int scan_bits = 8;
  double peak_counts = 100.0;  // kNoiseless for noise-free scans
  int replicates = 30;
  std::uint64_t seed = 1;

  SuccessCriteria criteria;
  int max_rounds = 3;
  /// Restricts the position search to p* +/- this distance, standing in for
  /// a calibrated aperture position.
  std::optional<double> search_halfwidth_um;
  /// Start bits to evaluate; empty means every feasible start.
  std::vector<std::size_t> start_bits;

  ApertureGeometry geometry() const;
  double margin_bit_size() const;
};

struct CellOutcomes {
  std::vector<TrialOutcome> trials;  // ordered by (start bit, replicate)
  std::size_t failures = 0;          // trials lost to flat series or solver failure
};

/// Runs replicates x start positions trials; each trial draws its noise from
/// a stream keyed by (seed, replicate, start bit).
CellOutcomes run_cell(const CellSpec& spec, int workers = 1);

enum class SweepKind { Bsr, ScanLength, AspectRatio, Patterning };

std::string to_string(SweepKind kind);
SweepKind parse_sweep_kind(const std::string& text);

struct EnergyPoint {
  double energy_kev = 0.0;
  double mu_per_um = 0.0;
};

struct SweepConfig {
  SweepKind kind = SweepKind::Bsr;
  CellSpec base;
  std::vector<double> values;          // BSR, scan bits, or aspect ratio
  std::vector<EnergyPoint> energies;   // bsr and scan-length sweeps
  std::vector<double> angles_deg;      // aspect-ratio sweep
  std::vector<double> noise_levels;    // peak counts; kNoiseless allowed
};

struct SweepCell {
  double param_value = 0.0;
  double second_value = 0.0;  // energy (keV) or angle (deg)
  double noise_level = 0.0;
  MspPair msp;
  std::size_t k = 0;
  double stderr_points = 0.0;
  std::size_t failures = 0;
  std::optional<SubsequenceStats> stats;  // patterning sweep only
};

struct SweepResult {
  SweepKind kind = SweepKind::Bsr;
  std::string param_name;
  std::string second_name;
  std::vector<SweepCell> cells;
  int replicates = 0;
  std::uint64_t seed = 0;

  std::size_t total_failures() const;
};

/// Checks every axis value against the sweep's preconditions up front.
void validate(const SweepConfig& config);

SweepResult sweep_bsr(const SweepConfig& config, int workers = 1);
SweepResult sweep_scan_length(const SweepConfig& config, int workers = 1);
SweepResult sweep_aspect_ratio(const SweepConfig& config, int workers = 1);
SweepResult sweep_patterning(const SweepConfig& config, int workers = 1);
SweepResult run_sweep(const SweepConfig& config, int workers = 1);

}  // namespace codap
