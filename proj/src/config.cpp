#include "codap/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "codap/error.hpp"
#include "codap/forward.hpp"

namespace codap {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "inf" || t == "noiseless") return kNoiseless;
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  long long v = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of numbers");
  return out;
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
  return v;
}

int positive_int(const std::string& key, long long v) {
  if (v < 1 || v > 1'000'000'000) throw ConfigError(key, "must be a positive integer");
  return static_cast<int>(v);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"aperture.order",
       [](auto& c, auto& k, auto& v) {
         const auto n = parse_int(k, v);
         if (n < 1 || n > 20) throw ConfigError(k, "order must be in [1, 20]");
         c.order = static_cast<int>(n);
       }},
      {"aperture.pattern", [](auto& c, auto&, auto& v) { c.pattern_bits = trim(v); }},
      {"aperture.bit_size_zero_um",
       [](auto& c, auto& k, auto& v) { c.bit_size_zero_um = positive(k, parse_double(k, v)); }},
      {"aperture.bit_size_one_um",
       [](auto& c, auto& k, auto& v) { c.bit_size_one_um = positive(k, parse_double(k, v)); }},
      {"aperture.thickness_um",
       [](auto& c, auto& k, auto& v) { c.thickness_um = positive(k, parse_double(k, v)); }},
      {"optics.mu_per_um",
       [](auto& c, auto& k, auto& v) {
         const double mu = parse_double(k, v);
         if (!(mu >= 0.0)) throw ConfigError(k, "must be non-negative");
         c.mu_per_um = mu;
       }},
      {"optics.energy_table", [](auto& c, auto&, auto& v) { c.energy_table = trim(v); }},
      {"optics.energy_kev",
       [](auto& c, auto& k, auto& v) { c.energy_kev = positive(k, parse_double(k, v)); }},
      {"optics.energies_kev", [](auto& c, auto& k, auto& v) { c.energies_kev = parse_list(k, v); }},
      {"optics.incidence_angle_deg",
       [](auto& c, auto& k, auto& v) {
         const double a = parse_double(k, v);
         if (!(a >= 0.0 && a < 90.0)) throw ConfigError(k, "must be in [0, 90)");
         c.incidence_angle_deg = a;
       }},
      {"grid.grid_step_um",
       [](auto& c, auto& k, auto& v) { c.grid_step_um = positive(k, parse_double(k, v)); }},
      {"grid.oversample",
       [](auto& c, auto& k, auto& v) { c.oversample = positive_int(k, parse_int(k, v)); }},
      {"signal.width_um",
       [](auto& c, auto& k, auto& v) { c.width_um = positive(k, parse_double(k, v)); }},
      {"signal.template",
       [](auto& c, auto& k, auto& v) {
         const auto t = trim(v);
         if (t == "gaussian") {
           c.template_kind = TemplateKind::Gaussian;
         } else if (t == "boxcar") {
           c.template_kind = TemplateKind::Boxcar;
         } else {
           throw ConfigError(k, "expected gaussian or boxcar");
         }
       }},
      {"signal.template_width_um",
       [](auto& c, auto& k, auto& v) { c.template_width_um = positive(k, parse_double(k, v)); }},
      {"scan.scan_bits",
       [](auto& c, auto& k, auto& v) { c.scan_bits = positive_int(k, parse_int(k, v)); }},
      {"scan.noise_levels",
       [](auto& c, auto& k, auto& v) {
         c.noise_levels = parse_list(k, v);
         for (double n : c.noise_levels) positive(k, n);
       }},
      {"scan.replicates",
       [](auto& c, auto& k, auto& v) { c.replicates = positive_int(k, parse_int(k, v)); }},
      {"scan.quick_replicates",
       [](auto& c, auto& k, auto& v) { c.quick_replicates = positive_int(k, parse_int(k, v)); }},
      {"scan.seed",
       [](auto& c, auto& k, auto& v) {
         const auto s = parse_int(k, v);
         if (s < 0) throw ConfigError(k, "must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"recovery.max_rounds",
       [](auto& c, auto& k, auto& v) { c.max_rounds = positive_int(k, parse_int(k, v)); }},
      {"recovery.search_halfwidth_um",
       [](auto& c, auto& k, auto& v) { c.search_halfwidth_um = positive(k, parse_double(k, v)); }},
      {"recovery.search_lo_um", [](auto& c, auto& k, auto& v) { c.search_lo_um = parse_double(k, v); }},
      {"recovery.search_hi_um", [](auto& c, auto& k, auto& v) { c.search_hi_um = parse_double(k, v); }},
      {"sweep.kind",
       [](auto& c, auto& k, auto& v) {
         try {
           c.sweep = parse_sweep_kind(trim(v));
         } catch (const ParameterError& e) {
           throw ConfigError(k, e.what());
         }
       }},
      {"sweep.values", [](auto& c, auto& k, auto& v) { c.values = parse_list(k, v); }},
      {"sweep.angles_deg", [](auto& c, auto& k, auto& v) { c.angles_deg = parse_list(k, v); }},
      {"criteria.epsilon",
       [](auto& c, auto& k, auto& v) { c.criteria.epsilon = positive(k, parse_double(k, v)); }},
      {"criteria.position_margin_bits",
       [](auto& c, auto& k, auto& v) {
         const double m = parse_double(k, v);
         if (!(m >= 0.0)) throw ConfigError(k, "must be non-negative");
         c.criteria.position_margin_bits = m;
       }},
      {"output.csv", [](auto& c, auto&, auto& v) { c.csv = trim(v); }},
      {"output.svg", [](auto& c, auto&, auto& v) { c.svg = trim(v); }},
  };
  return table;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source,
                              const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()), e.message());
  }

  ExperimentConfig config;
  config.base_dir = base_dir;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(source, "key '" + section + "' must live inside a [section]");
    }
    for (const auto& [name, node] : body) {
      const std::string key = section + "." + name;
      const auto it = setters().find(key);
      if (it == setters().end()) throw ConfigError(key, "unknown key");
      const auto value = node.get_value<std::string>();
      it->second(config, key, value);
      config.echo.emplace_back(key, trim(value));
    }
  }

  if (config.template_width() < config.grid_step_um) {
    throw ConfigError("signal.template_width_um", "must be at least one grid step");
  }
  if (config.width_um < config.grid_step_um) {
    throw ConfigError("signal.width_um", "must be at least one grid step");
  }
  if (config.search_lo_um.has_value() != config.search_hi_um.has_value()) {
    throw ConfigError("recovery.search_lo_um", "search_lo_um and search_hi_um go together");
  }
  if (config.pattern_bits) {
    try {
      (void)Pattern::from_string(*config.pattern_bits, config.order);
    } catch (const ParameterError& e) {
      throw ConfigError("aperture.pattern", e.what());
    }
  }
  if (!config.mu_per_um && !config.energy_table) {
    throw ConfigError("optics.mu_per_um",
                      "missing attenuation: set optics.mu_per_um or optics.energy_table");
  }
  if (config.energy_table) {
    config.energy_table = resolve(base_dir, *config.energy_table);
    if (!std::filesystem::exists(*config.energy_table)) {
      throw ConfigError("optics.energy_table",
                        "file not found: " + config.energy_table->string());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  return parse_config(in, path.string(), path.parent_path());
}

std::vector<EnergyPoint> load_energy_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("optics.energy_table", "cannot open " + path.string());
  std::vector<EnergyPoint> table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto where = path.string() + ":" + std::to_string(lineno);
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(where, "expected energy_kev,mu_per_um");
    const auto head = trim(line.substr(0, comma));
    if (head == "energy_kev") continue;
    const double e = parse_double(where, head);
    const double mu = parse_double(where, line.substr(comma + 1));
    if (!(e > 0.0) || !(mu >= 0.0)) throw ConfigError(where, "energy must be > 0 and mu >= 0");
    table.push_back({e, mu});
  }
  if (table.empty()) throw ConfigError("optics.energy_table", "table has no entries");
  return table;
}

double ExperimentConfig::mu_for(double energy) const {
  if (mu_per_um) return *mu_per_um;
  for (const auto& p : load_energy_table(*energy_table)) {
    if (std::fabs(p.energy_kev - energy) <= 1e-9 * std::max(1.0, energy)) return p.mu_per_um;
  }
  throw ConfigError("optics.energy_table", "no entry for " + std::to_string(energy) + " keV");
}

Pattern ExperimentConfig::pattern() const {
  return pattern_bits ? Pattern::from_string(*pattern_bits, order) : generate_de_bruijn(order);
}

ApertureGeometry ExperimentConfig::geometry() const {
  return ApertureGeometry(pattern(), bit_size_zero_um, bit_size_one_um, thickness_um);
}

SweepConfig make_sweep_config(const ExperimentConfig& c, const RunOverrides& overrides) {
  SweepConfig s;
  s.kind = c.sweep;
  auto& b = s.base;
  b.pattern = c.pattern();
  b.bit_size_zero_um = c.bit_size_zero_um;
  b.bit_size_one_um = c.bit_size_one_um;
  b.thickness_um = c.thickness_um;
  b.optics = OpticalContext{c.energy_kev, c.mu_for(c.energy_kev), c.incidence_angle_deg};
  b.grid_step_um = c.grid_step_um;
  b.oversample = c.oversample;
  b.signal_width_um = c.width_um;
  b.template_kind = c.template_kind;
  b.template_width_um = c.template_width();
  b.scan_bits = c.scan_bits;
  b.replicates = overrides.quick ? c.quick_replicates : c.replicates;
  b.seed = overrides.seed.value_or(c.seed);
  b.criteria = c.criteria;
  b.max_rounds = c.max_rounds;
  b.search_halfwidth_um = c.search_halfwidth_um;

  s.values = c.values;
  s.angles_deg = c.angles_deg;
  s.noise_levels = overrides.noiseless ? std::vector<double>{kNoiseless} : c.noise_levels;

  const auto energies = c.energies_kev.empty() ? std::vector<double>{c.energy_kev} : c.energies_kev;
  for (double e : energies) s.energies.push_back({e, c.mu_for(e)});

  if (s.kind != SweepKind::Patterning && s.values.empty()) {
    throw ConfigError("sweep.values", "sweep needs at least one axis value");
  }
  return s;
}

}  // namespace codap
