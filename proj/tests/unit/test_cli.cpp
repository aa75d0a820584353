#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "codap/cli.hpp"
#include "codap/config.hpp"
#include "codap/io.hpp"

namespace fs = std::filesystem;
using namespace codap;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("codap_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
    write("au.csv", "# energy, mu\nenergy_kev,mu_per_um\n10,0.2295\n20,0.1523\n");
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
  std::string read(const std::string& name) const {
    std::ifstream in(path / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kSweepIni = R"([aperture]
order = 8
thickness_um = 10
[optics]
energy_table = au.csv
energies_kev = 10,20
[scan]
noise_levels = 10,100
replicates = 4
quick_replicates = 1
seed = 99
[sweep]
kind = bsr
values = 0.25,0.5,1,2
)";

const char* kRecoverIni = R"([aperture]
order = 8
bit_size_zero_um = 10
bit_size_one_um = 10
thickness_um = 10
[optics]
mu_per_um = inf
[scan]
noise_levels = 10
seed = 4
)";

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

// truth.<id>.p_true_um header values of a simulated pixel file.
std::map<std::string, double> truth_positions(const std::string& csv) {
  std::map<std::string, double> truth;
  std::istringstream in(csv);
  std::string line;
  const std::string key = ".p_true_um = ";
  while (std::getline(in, line)) {
    auto at = line.find(key);
    if (line.rfind("# truth.", 0) == 0 && at != std::string::npos)
      truth[line.substr(8, at - 8)] = std::stod(line.substr(at + key.size()));
  }
  return truth;
}

int mismatches(const std::string& recovered, const std::map<std::string, double>& truth,
               double bit) {
  int bad = 0;
  auto lines = data_lines(recovered);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split(lines[i]);
    if (std::abs(std::stod(f[1]) - truth.at(f[0])) > bit) ++bad;
  }
  return bad;
}

}  // namespace

TEST_CASE("config parsing") {
  TempDir dir;
  std::istringstream in(kSweepIni);
  auto c = parse_config(in, "test.ini", dir.path);
  CHECK(c.energies_kev == std::vector<double>{10.0, 20.0});
  CHECK(c.mu_for(20.0) == doctest::Approx(0.1523));
  CHECK_THROWS_AS(c.mu_for(15.0), ConfigError);
  CHECK(c.seed == 99);
  CHECK(c.echo.size() == 10);

  auto sweep = make_sweep_config(c, RunOverrides{true, false, 5});
  CHECK(sweep.base.replicates == 1);
  CHECK(sweep.base.seed == 5);
  CHECK(sweep.energies.size() == 2);
  auto noiseless = make_sweep_config(c, RunOverrides{false, true, {}});
  REQUIRE(noiseless.noise_levels.size() == 1);
  CHECK(std::isinf(noiseless.noise_levels[0]));
}

TEST_CASE("config errors name the offending key") {
  auto err_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_config(in, "x.ini");
    } catch (const ConfigError& e) {
      return e.where();
    }
    return std::string("none");
  };
  CHECK(err_of("[aperture]\norder = 8\n") == "optics.mu_per_um");
  CHECK(err_of("[optics]\nmu_per_um = 0.1\nbogus = 1\n") == "optics.bogus");
  CHECK(err_of("[optics]\nmu_per_um = abc\n") == "optics.mu_per_um");
  CHECK(err_of("[optics]\nmu_per_um = 0.1\n[signal]\ntemplate = triangle\n") == "signal.template");
  CHECK(err_of("[optics]\nmu_per_um = 0.1\nenergy_table = /nonexistent/au.csv\n") ==
        "optics.energy_table");
  CHECK(err_of("[optics\nmu_per_um = 0.1\n").rfind("x.ini", 0) == 0);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(10.0) == "10");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("pixel file parsing") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_pixel_file(in, "px.csv");
  };
  auto px = parse("pixel_id,scan_index,position_um,counts\na,0,0,5\na,1,1,6\nb,0,0.5,1\nb,1,1.5,2\n");
  REQUIRE(px.size() == 2);
  CHECK(px[0].pixel_id == "a");
  CHECK(px[0].series.raw == std::vector<double>{5, 6});
  CHECK(px[1].series.step == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse(""), FormatError);
  CHECK_THROWS_AS(parse("pixel_id,scan_index,position_um,counts\n"), FormatError);
  CHECK_THROWS_AS(parse("pixel_id,scan_index,position_um,counts\na,0,0\n"), FormatError);
  CHECK_THROWS_AS(parse("pixel_id,scan_index,position_um,counts\na,0,0,-1\n"), FormatError);
  CHECK_THROWS_AS(parse("pixel_id,scan_index,position_um,counts\na,0,0,1\na,1,1,1\na,2,3,1\n"),
                  FormatError);
  CHECK_THROWS_AS(parse("pixel_id,scan_index,position_um,counts\na,1,0,1\na,0,1,1\n"),
                  FormatError);
}

TEST_CASE("pattern subcommand") {
  auto r = run({"pattern", "--order", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# pattern 00010111") != std::string::npos);
  r = run({"pattern", "--order", "8"});
  CHECK(r.code == 0);
  CHECK(data_lines(r.out).size() == 1 + 249);
  CHECK(run({"pattern", "--order", "0"}).code == 2);
}

TEST_CASE("quick sweep writes the expected table") {
  TempDir dir;
  auto ini = dir.write("bsr.ini", kSweepIni);
  auto r = run({"sweep", "--config", ini.string(), "--quick", "--out",
                (dir.path / "bsr.csv").string(), "--svg", (dir.path / "bsr.svg").string()});
  REQUIRE(r.code == 0);
  auto csv = dir.read("bsr.csv");
  auto lines = data_lines(csv);
  REQUIRE(lines.size() == 1 + 4 * 2 * 2);
  CHECK(lines[0] == "param_name,param_value,energy_kev_or_angle_deg,noise_level,msp_position,msp_shape,k,stderr");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split(lines[i]);
    CHECK(f[0] == "bsr");
    CHECK(f[6] == "249");
  }
  // The config is echoed in full.
  for (const char* key : {"# aperture.order = 8", "# optics.energies_kev = 10,20",
                          "# sweep.values = 0.25,0.5,1,2", "# run.quick = true"})
    CHECK(csv.find(key) != std::string::npos);
  CHECK(dir.read("bsr.svg").find("<svg") != std::string::npos);
  for (const auto& e : fs::directory_iterator(dir.path))
    CHECK(e.path().filename().string().find("partial") == std::string::npos);
}

TEST_CASE("noiseless sweep reaches 100 percent") {
  TempDir dir;
  auto ini = dir.write("bsr.ini", kSweepIni);
  auto r = run({"sweep", "--config", ini.string(), "--quick", "--noiseless", "--out",
                (dir.path / "n.csv").string()});
  REQUIRE(r.code == 0);
  auto lines = data_lines(dir.read("n.csv"));
  REQUIRE(lines.size() == 1 + 4 * 2);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split(lines[i]);
    if (std::stod(f[1]) >= 1.0) CHECK(f[4] == "100");
  }
}

TEST_CASE("sweep error exits") {
  TempDir dir;
  std::string text = kSweepIni;
  auto broken = dir.write("broken.ini",
                          text.replace(text.find("au.csv"), 6, "missing.csv"));
  auto r = run({"sweep", "--config", broken.string(), "--out", (dir.path / "x.csv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("optics.energy_table") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "x.csv"));

  auto nomu = dir.write("nomu.ini", "[aperture]\norder = 8\n[sweep]\nvalues = 1\n");
  r = run({"sweep", "--config", nomu.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("optics.mu_per_um") != std::string::npos);

  auto ok = dir.write("ok.ini", kSweepIni);
  r = run({"sweep", "--config", ok.string(), "--quick", "--out",
           (dir.path / "no" / "such" / "dir.csv").string()});
  CHECK(r.code == 3);

  CHECK(run({"sweep"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"sweep", "--config", (dir.path / "absent.ini").string()}).code != 0);
}

TEST_CASE("simulate then recover round trip") {
  TempDir dir;
  auto ini = dir.write("rec.ini", kRecoverIni);
  auto r = run({"simulate", "--config", ini.string(), "--noiseless", "--start-bits",
                "0,17,100,248", "--out", (dir.path / "px.csv").string()});
  REQUIRE(r.code == 0);
  auto truth = truth_positions(dir.read("px.csv"));
  REQUIRE(truth.size() == 4);

  r = run({"recover", "--config", ini.string(), "--noiseless", (dir.path / "px.csv").string(),
           "--out", (dir.path / "rec.csv").string()});
  REQUIRE(r.code == 0);
  auto lines = data_lines(dir.read("rec.csv"));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0].rfind("pixel_id,p_hat_um,residual,rounds,s_0,", 0) == 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split(lines[i]);
    CHECK(std::stod(f[1]) == truth.at(f[0]));
    CHECK(f.back() == "ok");
  }
}

TEST_CASE("truncated scans lose positions") {
  TempDir dir;
  auto ini = dir.write("rec.ini", kRecoverIni);
  std::string starts;
  for (int q = 0; q < 240; q += 4) starts += (starts.empty() ? "" : ",") + std::to_string(q);
  REQUIRE(run({"simulate", "--config", ini.string(), "--start-bits", starts, "--out",
               (dir.path / "px.csv").string()})
              .code == 0);
  auto truth = truth_positions(dir.read("px.csv"));
  auto px = (dir.path / "px.csv").string();
  REQUIRE(run({"recover", "--config", ini.string(), px, "--out", (dir.path / "r8.csv").string()})
              .code == 0);
  REQUIRE(run({"recover", "--config", ini.string(), px, "--truncate-bits", "4", "--out",
               (dir.path / "r4.csv").string()})
              .code == 0);
  int bad8 = mismatches(dir.read("r8.csv"), truth, 10.0);
  int bad4 = mismatches(dir.read("r4.csv"), truth, 10.0);
  CAPTURE(bad8);
  CAPTURE(bad4);
  CHECK(bad4 > bad8);
}

TEST_CASE("recover input errors") {
  TempDir dir;
  auto ini = dir.write("rec.ini", kRecoverIni);
  auto empty = dir.write("empty.csv", "");
  auto r = run({"recover", "--config", ini.string(), empty.string(), "--out",
                (dir.path / "o.csv").string()});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir.path / "o.csv"));
  CHECK(run({"recover", "--config", ini.string(), (dir.path / "none.csv").string(), "--out",
             (dir.path / "o.csv").string()}).code == 3);
  CHECK(run({"recover", "--config", ini.string(), empty.string()}).code == 2);

  // A pixel that never sees a bar edge is reported flat, not fatal.
  std::string flat = "pixel_id,scan_index,position_um,counts\n";
  for (int m = 0; m < 89; ++m) flat += "f," + std::to_string(m) + "," + std::to_string(m) + ",50\n";
  auto fp = dir.write("flat.csv", flat);
  r = run({"recover", "--config", ini.string(), fp.string(), "--out", (dir.path / "f.csv").string()});
  CHECK(r.code == 0);
  auto lines = data_lines(dir.read("f.csv"));
  REQUIRE(lines.size() == 2);
  CHECK(split(lines[1]).back() == "flat");
}
