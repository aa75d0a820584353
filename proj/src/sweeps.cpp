#include "codap/sweeps.hpp"

#include <algorithm>
#include <cmath>

#include "codap/error.hpp"
#include "codap/forward.hpp"
#include "codap/parallel.hpp"
#include "codap/random.hpp"

namespace codap {

Signal make_template(TemplateKind kind, double width, double grid_step) {
  return unit_sum(kind == TemplateKind::Gaussian ? make_gaussian_signal(width, grid_step)
                                                 : make_boxcar_signal(width, grid_step));
}

ApertureGeometry CellSpec::geometry() const {
  return ApertureGeometry(pattern, bit_size_zero_um, bit_size_one_um, thickness_um);
}

double CellSpec::margin_bit_size() const { return std::max(bit_size_zero_um, bit_size_one_um); }

std::size_t scan_points(double scan_length_um, double grid_step_um, std::size_t signal_cells) {
  if (!(grid_step_um > 0.0)) throw ParameterError("grid step must be positive");
  const auto cells = static_cast<std::size_t>(std::llround(scan_length_um / grid_step_um));
  if (cells == 0) throw ParameterError("scan length is below one grid step");
  return cells + signal_cells - 1;
}

CellOutcomes run_cell(const CellSpec& spec, int workers) {
  spec.criteria.validate();
  if (spec.replicates < 1) throw ParameterError("replicates must be at least 1");
  if (spec.scan_bits < 1) throw ParameterError("scan length must be at least one bit");
  if (static_cast<std::size_t>(spec.scan_bits) > spec.pattern.size()) {
    throw ParameterError("scan length exceeds the pattern");
  }
  if (std::min(spec.bit_size_zero_um, spec.bit_size_one_um) < spec.grid_step_um) {
    throw ParameterError("bit size is below the grid step");
  }

  const auto geometry = spec.geometry();
  const double trailing = spec.signal_width_um + spec.template_width_um + spec.margin_bit_size();
  const auto raw = build_profile(geometry, spec.optics, spec.grid_step_um, spec.oversample, trailing);
  const auto profile = raw.normalized();

  const auto signal = make_gaussian_signal(spec.signal_width_um, spec.grid_step_um);
  const auto truth_shape = unit_sum(signal).values;
  const auto templ = make_template(spec.template_kind, spec.template_width_um, spec.grid_step_um);
  if (templ.size() != signal.size()) {
    throw ParameterError("template and signal must span the same number of grid cells");
  }

  std::vector<std::size_t> starts = spec.start_bits;
  if (starts.empty()) {
    for (std::size_t q = 0; q + static_cast<std::size_t>(spec.scan_bits) <= spec.pattern.size(); ++q) {
      starts.push_back(q);
    }
  }
  for (auto q : starts) {
    if (q + static_cast<std::size_t>(spec.scan_bits) > spec.pattern.size()) {
      throw ParameterError("start bit leaves no room for the scan");
    }
  }

  const bool noiseless = std::isinf(spec.peak_counts);
  const auto reps = static_cast<std::size_t>(spec.replicates);
  const std::size_t cols = signal.size();
  const std::size_t total = starts.size() * reps;

  CellOutcomes out;
  out.trials.resize(total);

  parallel_for(total, workers, [&](std::size_t i) {
    const std::size_t q = starts[i / reps];
    const std::size_t rep = i % reps;
    const double z0 = geometry.bit_start(q);
    const double z1 = geometry.bit_start(q + static_cast<std::size_t>(spec.scan_bits));
    const auto rows = scan_points(z1 - z0, spec.grid_step_um, cols);
    const auto truth_p = static_cast<std::size_t>(raw.index_of(z0));

    const auto matrix = build_coding_matrix(raw, truth_p, rows, cols);
    auto series = simulate(matrix, signal, spec.peak_counts, derive_seed({spec.seed, rep, q}));

    RecoveryOptions options;
    options.max_rounds = spec.max_rounds;
    if (spec.search_halfwidth_um) {
      const auto half = static_cast<std::size_t>(std::llround(*spec.search_halfwidth_um / spec.grid_step_um));
      const auto full = full_search_range(profile.size(), rows, cols);
      options.range = SearchRange{truth_p > half ? truth_p - half : 0,
                                  std::min(full.last, truth_p + half + 1)};
    }

    TrialOutcome outcome;
    outcome.q = q;
    try {
      series = noiseless ? normalize(std::move(series), known_levels(1.0, raw))
                         : normalize(std::move(series));
      const auto result = recover(profile, series, templ, options);
      outcome = score(result, GroundTruth{truth_p, truth_shape}, spec.criteria,
                      spec.margin_bit_size(), spec.grid_step_um, q);
    } catch (const FlatSeriesError&) {
      outcome = TrialOutcome{0, 0, q, true};
    } catch (const NumericalFailure&) {
      outcome = TrialOutcome{0, 0, q, true};
    }
    out.trials[i] = outcome;
  });

  out.failures = static_cast<std::size_t>(
      std::count_if(out.trials.begin(), out.trials.end(), [](const auto& t) { return t.failed; }));
  return out;
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Bsr: return "bsr";
    case SweepKind::ScanLength: return "scan_length";
    case SweepKind::AspectRatio: return "aspect_ratio";
    case SweepKind::Patterning: return "patterning";
  }
  return "unknown";
}

SweepKind parse_sweep_kind(const std::string& text) {
  if (text == "bsr") return SweepKind::Bsr;
  if (text == "scan_length") return SweepKind::ScanLength;
  if (text == "aspect_ratio") return SweepKind::AspectRatio;
  if (text == "patterning") return SweepKind::Patterning;
  throw ParameterError("unknown sweep kind '" + text + "'");
}

std::size_t SweepResult::total_failures() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.failures;
  return n;
}

namespace {

SweepCell summarize(double param, double second, double noise, const CellOutcomes& outcomes) {
  SweepCell cell;
  cell.param_value = param;
  cell.second_value = second;
  cell.noise_level = noise;
  cell.msp = msp(outcomes.trials);
  cell.k = outcomes.trials.size();
  cell.stderr_points = msp_standard_error(cell.msp.position, cell.k);
  cell.failures = static_cast<std::size_t>(std::count_if(
      outcomes.trials.begin(), outcomes.trials.end(), [](const auto& t) { return t.failed; }));
  return cell;
}

void require_axes(const SweepConfig& config, bool need_energies, bool need_angles) {
  if (config.values.empty()) throw ParameterError("sweep has no axis values");
  if (config.noise_levels.empty()) throw ParameterError("sweep has no noise levels");
  if (need_energies && config.energies.empty()) throw ParameterError("sweep has no energies");
  if (need_angles && config.angles_deg.empty()) throw ParameterError("sweep has no angles");
}

SweepResult make_result(const SweepConfig& config, std::string param, std::string second) {
  SweepResult r;
  r.kind = config.kind;
  r.param_name = std::move(param);
  r.second_name = std::move(second);
  r.replicates = config.base.replicates;
  r.seed = config.base.seed;
  return r;
}

}  // namespace

SweepResult sweep_bsr(const SweepConfig& config, int workers) {
  require_axes(config, true, false);
  auto result = make_result(config, "bsr", "energy_kev");
  for (double bsr : config.values) {
    if (!(bsr > 0.0)) throw ParameterError("BSR values must be positive");
    const double bit = bsr * config.base.signal_width_um;
    if (bit < config.base.grid_step_um) throw ParameterError("BSR gives a bit below the grid step");
    for (const auto& e : config.energies) {
      for (double noise : config.noise_levels) {
        CellSpec spec = config.base;
        spec.bit_size_zero_um = bit;
        spec.bit_size_one_um = bit;
        spec.thickness_um = config.base.signal_width_um;
        spec.optics.energy_kev = e.energy_kev;
        spec.optics.attenuation_per_um = e.mu_per_um;
        spec.peak_counts = noise;
        result.cells.push_back(summarize(bsr, e.energy_kev, noise, run_cell(spec, workers)));
      }
    }
  }
  return result;
}

SweepResult sweep_scan_length(const SweepConfig& config, int workers) {
  require_axes(config, true, false);
  auto result = make_result(config, "scan_bits", "energy_kev");
  for (double bits : config.values) {
    if (!(bits >= 1.0) || bits != std::floor(bits)) {
      throw ParameterError("scan lengths must be whole numbers of bits >= 1");
    }
    for (const auto& e : config.energies) {
      for (double noise : config.noise_levels) {
        CellSpec spec = config.base;
        spec.scan_bits = static_cast<int>(bits);
        spec.optics.energy_kev = e.energy_kev;
        spec.optics.attenuation_per_um = e.mu_per_um;
        spec.peak_counts = noise;
        result.cells.push_back(summarize(bits, e.energy_kev, noise, run_cell(spec, workers)));
      }
    }
  }
  return result;
}

SweepResult sweep_aspect_ratio(const SweepConfig& config, int workers) {
  require_axes(config, false, true);
  auto result = make_result(config, "aspect_ratio", "angle_deg");
  const double bit = config.base.bit_size_zero_um;
  for (double aspect : config.values) {
    if (!(aspect > 0.0)) throw ParameterError("aspect ratios must be positive");
    for (double angle : config.angles_deg) {
      if (!(angle >= 0.0 && angle < 90.0)) throw ParameterError("angles must be in [0, 90)");
      for (double noise : config.noise_levels) {
        CellSpec spec = config.base;
        spec.bit_size_one_um = bit;
        spec.thickness_um = aspect * bit;
        spec.optics.incidence_angle_deg = angle;
        spec.peak_counts = noise;
        result.cells.push_back(summarize(aspect, angle, noise, run_cell(spec, workers)));
      }
    }
  }
  return result;
}

SweepResult sweep_patterning(const SweepConfig& config, int workers) {
  if (config.noise_levels.empty()) throw ParameterError("sweep has no noise levels");
  auto result = make_result(config, "start_bit", "energy_kev");
  const auto window = static_cast<std::size_t>(config.base.scan_bits);

  std::vector<std::size_t> starts;
  for (double v : config.values) {
    if (!(v >= 0.0) || v != std::floor(v)) throw ParameterError("start bits must be whole numbers");
    starts.push_back(static_cast<std::size_t>(v));
  }
  if (starts.empty()) {
    for (std::size_t q = 0; q + window <= config.base.pattern.size(); ++q) starts.push_back(q);
  }

  std::vector<CellOutcomes> per_noise;
  for (double noise : config.noise_levels) {
    CellSpec spec = config.base;
    spec.peak_counts = noise;
    spec.start_bits = starts;
    per_noise.push_back(run_cell(spec, workers));
  }

  const auto reps = static_cast<std::size_t>(config.base.replicates);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const auto stats = window_stats(config.base.pattern, starts[s], window);
    for (std::size_t j = 0; j < config.noise_levels.size(); ++j) {
      CellOutcomes slice;
      const auto first = per_noise[j].trials.begin() + static_cast<std::ptrdiff_t>(s * reps);
      slice.trials.assign(first, first + static_cast<std::ptrdiff_t>(reps));
      auto cell = summarize(static_cast<double>(starts[s]), config.base.optics.energy_kev,
                            config.noise_levels[j], slice);
      cell.stats = stats;
      result.cells.push_back(cell);
    }
  }
  return result;
}

void validate(const SweepConfig& config) {
  const auto& b = config.base;
  b.criteria.validate();
  b.optics.validate();
  if (b.replicates < 1) throw ParameterError("replicates must be at least 1");
  if (config.noise_levels.empty()) throw ParameterError("sweep has no noise levels");
  for (double n : config.noise_levels) {
    if (!(n > 0.0)) throw ParameterError("noise levels must be positive peak counts");
  }
  for (const auto& e : config.energies) {
    if (!(e.mu_per_um >= 0.0)) throw ParameterError("attenuation must be non-negative");
  }
  switch (config.kind) {
    case SweepKind::Bsr:
      require_axes(config, true, false);
      for (double v : config.values) {
        if (!(v > 0.0)) throw ParameterError("BSR values must be positive");
        if (v * b.signal_width_um < b.grid_step_um) {
          throw ParameterError("BSR gives a bit below the grid step");
        }
      }
      break;
    case SweepKind::ScanLength:
      require_axes(config, true, false);
      for (double v : config.values) {
        if (!(v >= 1.0) || v != std::floor(v) || v > static_cast<double>(b.pattern.size())) {
          throw ParameterError("scan lengths must be whole numbers of bits in [1, pattern length]");
        }
      }
      break;
    case SweepKind::AspectRatio:
      require_axes(config, false, true);
      for (double v : config.values) {
        if (!(v > 0.0)) throw ParameterError("aspect ratios must be positive");
      }
      for (double a : config.angles_deg) {
        if (!(a >= 0.0 && a < 90.0)) throw ParameterError("angles must be in [0, 90)");
      }
      break;
    case SweepKind::Patterning:
      for (double v : config.values) {
        if (!(v >= 0.0) || v != std::floor(v) ||
            v + b.scan_bits > static_cast<double>(b.pattern.size())) {
          throw ParameterError("start bits must be whole numbers leaving room for the scan");
        }
      }
      break;
  }
}

SweepResult run_sweep(const SweepConfig& config, int workers) {
  validate(config);
  switch (config.kind) {
    case SweepKind::Bsr: return sweep_bsr(config, workers);
    case SweepKind::ScanLength: return sweep_scan_length(config, workers);
    case SweepKind::AspectRatio: return sweep_aspect_ratio(config, workers);
    case SweepKind::Patterning: return sweep_patterning(config, workers);
  }
  throw ParameterError("unknown sweep kind");
}

}  // namespace codap
