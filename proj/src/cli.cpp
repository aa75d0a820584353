#include "codap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "codap/config.hpp"
#include "codap/error.hpp"
#include "codap/io.hpp"
#include "codap/parallel.hpp"
#include "codap/random.hpp"
#include "codap/svg.hpp"

namespace codap {

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  int workers = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  std::optional<std::uint64_t> seed;
  bool quick = false;
  bool noiseless = false;
};

HeaderLines config_header(const std::string& command, const ExperimentConfig& config) {
  HeaderLines h{{"codap.command", command}};
  h.insert(h.end(), config.echo.begin(), config.echo.end());
  return h;
}

std::filesystem::path output_path(const std::string& flag,
                                  const std::optional<std::filesystem::path>& configured,
                                  const std::filesystem::path& base) {
  if (!flag.empty()) return flag;
  if (!configured) throw ConfigError("output.csv", "no output path (set output.csv or --out)");
  return configured->is_absolute() || base.empty() ? *configured : base / *configured;
}

// Shared by simulate and recover: the raw profile with enough open space
// after the aperture for a scan that starts on the last bit.
TransmissivityProfile raw_profile(const ExperimentConfig& c) {
  const OpticalContext optics{c.energy_kev, c.mu_for(c.energy_kev), c.incidence_angle_deg};
  const double trailing =
      c.width_um + c.template_width() + std::max(c.bit_size_zero_um, c.bit_size_one_um);
  return build_profile(c.geometry(), optics, c.grid_step_um, c.oversample, trailing);
}

int cmd_sweep(const CommonFlags& flags, const std::string& svg_flag, std::ostream& out,
              std::ostream& err) {
  const auto config = load_config(flags.config);
  const RunOverrides overrides{flags.quick, flags.noiseless, flags.seed};
  const auto sweep = make_sweep_config(config, overrides);
  validate(sweep);
  const auto csv_path = output_path(flags.out, config.csv, config.base_dir);

  const auto result = run_sweep(sweep, flags.workers);
  for (const auto& c : result.cells) {
    out << result.param_name << '=' << format_number(c.param_value) << ' ' << result.second_name
        << '=' << format_number(c.second_value) << " noise=" << format_number(c.noise_level)
        << " msp_position=" << format_number(c.msp.position)
        << " msp_shape=" << format_number(c.msp.shape) << " k=" << c.k << '\n';
  }

  auto header = config_header("sweep", config);
  header.emplace_back("run.replicates", std::to_string(sweep.base.replicates));
  header.emplace_back("run.seed", std::to_string(sweep.base.seed));
  header.emplace_back("run.quick", flags.quick ? "true" : "false");
  header.emplace_back("run.noiseless", flags.noiseless ? "true" : "false");
  write_atomic(csv_path, sweep_csv(result, header));

  std::optional<std::filesystem::path> svg_path;
  if (!svg_flag.empty()) {
    svg_path = svg_flag;
  } else if (config.svg) {
    svg_path = config.svg->is_absolute() ? *config.svg : config.base_dir / *config.svg;
  }
  if (svg_path) write_atomic(*svg_path, sweep_svg(result));

  if (const auto failures = result.total_failures(); failures > 0) {
    err << "warning: " << failures << " trial(s) failed and were scored as misses\n";
  }
  return kExitOk;
}

int cmd_simulate(const CommonFlags& flags, const std::vector<std::size_t>& start_bits,
                 std::uint64_t replicate, bool pixel_format, std::ostream& out) {
  const auto config = load_config(flags.config);
  const auto geometry = config.geometry();
  const auto raw = raw_profile(config);
  const auto signal = make_gaussian_signal(config.width_um, config.grid_step_um);
  const double peak = flags.noiseless ? kNoiseless : config.noise_levels.front();
  const auto seed = flags.seed.value_or(config.seed);
  const auto bits = static_cast<std::size_t>(config.scan_bits);

  std::vector<PixelSeries> pixels;
  HeaderLines header = config_header("simulate", config);
  header.emplace_back("run.seed", std::to_string(seed));
  header.emplace_back("run.replicate", std::to_string(replicate));
  header.emplace_back("run.peak_counts", format_number(peak));
  for (std::size_t i = 0; i < start_bits.size(); ++i) {
    const auto q = start_bits[i];
    if (q + bits > geometry.pattern().size()) {
      throw ParameterError("start bit " + std::to_string(q) + " leaves no room for the scan");
    }
    const double z0 = geometry.bit_start(q);
    const auto rows = scan_points(geometry.bit_start(q + bits) - z0, config.grid_step_um, signal.size());
    const auto p = static_cast<std::size_t>(raw.index_of(z0));
    const auto matrix = build_coding_matrix(raw, p, rows, signal.size());
    PixelSeries px;
    px.pixel_id = std::to_string(i);
    px.series = simulate(matrix, signal, peak, derive_seed({seed, replicate, q}));
    for (std::size_t m = 0; m < rows; ++m) {
      px.positions_um.push_back(static_cast<double>(m) * config.grid_step_um);
    }
    header.emplace_back("truth." + px.pixel_id + ".start_bit", std::to_string(q));
    header.emplace_back("truth." + px.pixel_id + ".p_true_um",
                        format_number(raw.origin() + static_cast<double>(p) * raw.grid_step()));
    pixels.push_back(std::move(px));
  }

  const std::string content = pixel_format || pixels.size() > 1
                                  ? pixel_file_csv(pixels, header)
                                  : scan_series_csv(pixels.front().series, header);
  if (flags.out.empty()) {
    out << content;
  } else {
    write_atomic(flags.out, content);
  }
  return kExitOk;
}

int cmd_recover(const CommonFlags& flags, const std::string& series_path,
                std::optional<int> truncate_bits, std::ostream& err) {
  const auto config = load_config(flags.config);
  const auto csv_path = output_path(flags.out, config.csv, config.base_dir);

  std::ifstream in(series_path);
  if (!in) throw IoError("cannot open " + series_path);
  const auto pixels = read_pixel_file(in, series_path);

  const auto raw = raw_profile(config);
  const auto profile = raw.normalized();
  const auto templ = make_template(config.template_kind, config.template_width(), config.grid_step_um);
  const std::size_t cols = templ.size();

  for (const auto& px : pixels) {
    if (std::fabs(px.series.step - config.grid_step_um) > 1e-6) {
      throw ConfigError("grid.grid_step_um", "pixel " + px.pixel_id + " scan step " +
                                                 format_number(px.series.step) +
                                                 " um differs from the grid step");
    }
  }

  std::optional<std::size_t> keep;
  if (truncate_bits) {
    if (*truncate_bits < 1) throw ConfigError("--truncate-bits", "must be at least 1");
    const double bit = std::max(config.bit_size_zero_um, config.bit_size_one_um);
    keep = scan_points(*truncate_bits * bit, config.grid_step_um, cols);
  }

  std::vector<PixelRecovery> rows(pixels.size());
  parallel_for(pixels.size(), flags.workers, [&](std::size_t i) {
    auto& row = rows[i];
    row.pixel_id = pixels[i].pixel_id;
    ScanSeries series = pixels[i].series;
    if (keep && *keep < series.raw.size()) series.raw.resize(*keep);

    RecoveryOptions options;
    options.max_rounds = config.max_rounds;
    if (config.search_lo_um) {
      const auto full = full_search_range(profile.size(), series.size(), cols);
      const auto lo = std::clamp<std::ptrdiff_t>(profile.index_of(*config.search_lo_um), 0,
                                                 static_cast<std::ptrdiff_t>(full.last));
      const auto hi = std::clamp<std::ptrdiff_t>(profile.index_of(*config.search_hi_um) + 1, 0,
                                                 static_cast<std::ptrdiff_t>(full.last));
      options.range = SearchRange{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
    }
    try {
      series = flags.noiseless ? normalize(std::move(series), known_levels(1.0, raw))
                               : normalize(std::move(series));
      row.result = recover(profile, series, templ, options);
      row.p_hat_um = profile.origin() + static_cast<double>(row.result.position) * profile.grid_step();
    } catch (const FlatSeriesError&) {
      row.status = PixelStatus::Flat;
    } catch (const NumericalFailure&) {
      row.status = PixelStatus::Failed;
    } catch (const ParameterError&) {
      row.status = PixelStatus::Failed;
    }
  });

  auto header = config_header("recover", config);
  header.emplace_back("run.series", series_path);
  if (truncate_bits) header.emplace_back("run.truncate_bits", std::to_string(*truncate_bits));
  write_atomic(csv_path, recovery_csv(rows, cols, header));

  const auto flat = std::count_if(rows.begin(), rows.end(),
                                  [](const auto& r) { return r.status == PixelStatus::Flat; });
  const auto failed = std::count_if(rows.begin(), rows.end(),
                                    [](const auto& r) { return r.status == PixelStatus::Failed; });
  if (flat + failed > 0) {
    err << "warning: " << flat << " flat and " << failed << " failed pixel(s) skipped\n";
  }
  return kExitOk;
}

int cmd_pattern(int order, std::optional<std::string> bits, double bit_zero, double bit_one,
                std::ostream& out) {
  const auto pattern = bits ? Pattern::from_string(*bits, order) : generate_de_bruijn(order);
  const ApertureGeometry geometry(pattern, bit_zero, bit_one, 1.0);
  out << "# pattern " << pattern.to_string() << '\n';
  out << "# order " << order << '\n';
  out << "# length_bits " << pattern.size() << '\n';
  out << "# physical_length_um " << format_number(geometry.total_length()) << '\n';
  out << "# unique_windows " << (verify_uniqueness(pattern, static_cast<std::size_t>(order)) ? "true" : "false")
      << '\n';
  out << "start,zeros_fraction,bit_flips\n";
  for (const auto& s : all_window_stats(pattern, static_cast<std::size_t>(order))) {
    out << s.start_index << ',' << format_number(s.zeros_fraction) << ',' << s.bit_flips << '\n';
  }
  return kExitOk;
}

void add_common(CLI::App* sub, CommonFlags& flags, bool needs_config) {
  auto* opt = sub->add_option("--config", flags.config, "Experiment config file");
  if (needs_config) opt->required();
  sub->add_option("--out", flags.out, "Output path");
  sub->add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", flags.seed, "Override the base seed");
  sub->add_flag("--noiseless", flags.noiseless, "Noise-free simulation");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coded-aperture scan simulation, recovery and sensitivity sweeps", "codap"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string svg;
  auto* sweep = app.add_subcommand("sweep", "Run a sensitivity sweep and write MSP tables");
  add_common(sweep, flags, true);
  sweep->add_flag("--quick", flags.quick, "Use the quick replicate count");
  sweep->add_option("--svg", svg, "Also write an SVG plot");

  std::string series_path;
  std::optional<int> truncate_bits;
  auto* recov = app.add_subcommand("recover", "Recover position and shape per pixel series");
  add_common(recov, flags, true);
  recov->add_option("series", series_path, "Pixel series CSV")->required();
  recov->add_option("--truncate-bits", truncate_bits, "Use only the first k bits of each scan");

  std::vector<std::size_t> start_bits{0};
  std::uint64_t replicate = 0;
  bool pixel_format = false;
  auto* sim = app.add_subcommand("simulate", "Simulate scan series for debugging");
  add_common(sim, flags, true);
  sim->add_option("--start-bits", start_bits, "Start bits of the scanned windows")->delimiter(',');
  sim->add_option("--replicate", replicate, "Noise replicate index");
  sim->add_flag("--pixel-format", pixel_format, "Write the pixel series format");

  int order = 8;
  std::optional<std::string> bits;
  double bit_zero = 10.0;
  double bit_one = 10.0;
  auto* pat = app.add_subcommand("pattern", "Print a de Bruijn pattern with window statistics");
  pat->add_option("--order", order, "Pattern order")->check(CLI::Range(1, 20));
  pat->add_option("--bits", bits, "Explicit bit string instead of the de Bruijn pattern");
  pat->add_option("--bit-zero", bit_zero, "Physical length of a 0 bit (um)");
  pat->add_option("--bit-one", bit_one, "Physical length of a 1 bit (um)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(flags, svg, out, err);
    if (recov->parsed()) return cmd_recover(flags, series_path, truncate_bits, err);
    if (sim->parsed()) return cmd_simulate(flags, start_bits, replicate, pixel_format, out);
    return cmd_pattern(order, bits, bit_zero, bit_one, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateInputError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace codap
