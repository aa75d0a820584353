#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "codap/error.hpp"
#include "codap/metrics.hpp"
#include "codap/random.hpp"
#include "codap/recovery.hpp"

using namespace codap;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// dB(8) aperture with 10 um bits, a 10 um Gaussian beam and an 8-bit scan.
struct Scene {
  ApertureGeometry geometry{generate_de_bruijn(8), 10.0, 10.0, 10.0};
  OpticalContext optics;
  TransmissivityProfile raw;
  TransmissivityProfile profile;
  Signal signal = make_gaussian_signal(10.0, 1.0);
  Signal templ = unit_sum(make_gaussian_signal(10.0, 1.0));
  std::size_t rows = 89;

  Scene(double mu, double angle) : optics{10.0, mu, angle} {
    raw = build_profile(geometry, optics, 1.0, 16, 30.0);
    profile = raw.normalized();
  }

  std::size_t truth(std::size_t bit) const {
    return static_cast<std::size_t>(raw.index_of(geometry.bit_start(bit)));
  }

  ScanSeries scan(std::size_t p, double peak, std::uint64_t seed) const {
    auto s = simulate(build_coding_matrix(raw, p, rows, signal.size()), signal, peak, seed);
    if (std::isinf(peak)) return normalize(std::move(s), known_levels(1.0, raw));
    return normalize(std::move(s));
  }
};

ScanSeries series_of(std::vector<double> raw) {
  ScanSeries s;
  s.raw = std::move(raw);
  return s;
}

}  // namespace

TEST_CASE("normalization arithmetic") {
  auto s = series_of({100.0, 5000.0, 10000.0});
  auto lv = estimate_levels(s);
  CHECK(lv.mu0 == doctest::Approx(120.0));
  CHECK(lv.mu1 == doctest::Approx(9800.0));
  auto n = normalize(s);
  REQUIRE(n.normalized);
  CHECK((*n.normalized)[0] == doctest::Approx(-20.0 / 9680.0));
  CHECK((*normalize(series_of({100.0, 9800.0, 10000.0})).normalized)[1] == doctest::Approx(1.0));

  auto z = estimate_levels(series_of({0.0, 50.0, 400.0}));
  CHECK(z.mu0 == 0.0);
  CHECK(z.mu1 == doctest::Approx(360.0));

  CHECK_THROWS_AS(normalize(series_of({7.0, 7.0, 7.0})), FlatSeriesError);
  CHECK_THROWS_AS(normalize(series_of({7.0})), ParameterError);
  CHECK_THROWS_AS(normalize(series_of({1.0, -1.0})), ParameterError);
}

TEST_CASE("known levels rescale exactly") {
  Scene scene(0.2295, 10.0);
  auto p = scene.truth(40);
  auto m = build_coding_matrix(scene.raw, p, scene.rows, scene.signal.size());
  auto base = simulate(m, scene.signal, 100.0, 1, false);
  auto big = simulate(m, scene.signal, 1e6, 1, false);
  auto a = normalize(base, known_levels(100.0, scene.raw));
  auto b = normalize(big, known_levels(1e6, scene.raw));
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK((*a.normalized)[i] == doctest::Approx((*b.normalized)[i]).epsilon(1e-12));
  CHECK(search_position(scene.profile, a, scene.templ).position ==
        search_position(scene.profile, b, scene.templ).position);
}

TEST_CASE("estimated levels converge with counts") {
  Scene scene(0.2295, 0.0);
  auto p = scene.truth(100);
  auto m = build_coding_matrix(scene.raw, p, scene.rows, scene.signal.size());
  auto at = [&](double peak) { return *normalize(simulate(m, scene.signal, peak, 1, false)).normalized; };
  auto ref = at(1e8), lo = at(1e2), mid = at(1e4);
  double dlo = 0.0, dmid = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    dlo = std::max(dlo, std::abs(lo[i] - ref[i]));
    dmid = std::max(dmid, std::abs(mid[i] - ref[i]));
  }
  CHECK(dmid < dlo);
  CHECK(dmid < 0.1);
}

TEST_CASE("search range bounds") {
  CHECK(full_search_range(100, 80, 10).last == 12);
  Scene scene(kInf, 0.0);
  auto s = scene.scan(scene.truth(3), kInf, 0);
  CHECK_THROWS_AS(search_position(scene.profile, s, scene.templ, SearchRange{5, 5}),
                  ParameterError);
  CHECK_THROWS_AS(search_position(scene.profile, s, scene.templ, SearchRange{0, 100000}),
                  ParameterError);
  CHECK_THROWS_AS(search_position(scene.profile, series_of({1.0, 2.0}), scene.templ),
                  ParameterError);
}

TEST_CASE("noiseless search finds the true offset") {
  Scene scene(kInf, 0.0);
  for (std::size_t bit = 0; bit < 249; bit += 7) {
    auto p = scene.truth(bit);
    auto s = scene.scan(p, kInf, 0);
    auto fit = search_position(scene.profile, s, scene.templ);
    CHECK(fit.position == p);
    CHECK(fit.residual < 1e-20);
  }
}

TEST_CASE("boxcar template lands within a bit") {
  Scene scene(kInf, 0.0);
  auto box = unit_sum(make_boxcar_signal(10.0, 1.0));
  for (std::size_t bit = 0; bit < 249; ++bit) {
    auto p = scene.truth(bit);
    auto fit = search_position(scene.profile, scene.scan(p, kInf, 0), box);
    CHECK(std::abs(static_cast<double>(fit.position) - static_cast<double>(p)) <= 10.0);
  }
}

TEST_CASE("restricted search returns the in-range minimizer") {
  Scene scene(kInf, 0.0);
  auto p = scene.truth(120);
  auto s = scene.scan(p, kInf, 0);
  SearchRange r{p + 25, p + 60};
  auto fit = search_position(scene.profile, s, scene.templ, r);
  CHECK(fit.position >= r.first);
  CHECK(fit.position < r.last);
  CHECK(fit.residual > 0.0);
  double best = kInf;
  std::size_t arg = 0;
  for (std::size_t q = r.first; q < r.last; ++q) {
    double v = objective(scene.profile, s, q, scene.templ.values);
    if (v < best) best = v, arg = q;
  }
  CHECK(fit.position == arg);
  CHECK(fit.residual == doctest::Approx(best));
}

TEST_CASE("signal solve special cases") {
  TransmissivityProfile unit({1.0}, 1.0, 0.0);
  auto pos = series_of({0.0, 0.0});
  pos.normalized = std::vector<double>{0.7};
  CHECK(solve_signal(unit, pos, 0, 1)[0] == doctest::Approx(0.7));
  pos.normalized = std::vector<double>{-0.7};
  CHECK(solve_signal(unit, pos, 0, 1)[0] == 0.0);

  // Data opposite to every column of A'.
  Scene scene(0.2295, 0.0);
  auto p = scene.truth(50);
  auto a = build_coding_matrix(scene.profile, p, scene.rows, 10, true);
  auto neg = a.apply(std::vector<double>(10, 1.0));
  for (auto& v : neg) v = -v;
  auto s = series_of(std::vector<double>(scene.rows, 1.0));
  s.normalized = neg;
  for (double v : solve_signal(scene.profile, s, p, 10)) CHECK(v == 0.0);
}

TEST_CASE("square invertible system recovers the signal") {
  // Profile whose 4x4 Hankel window is well conditioned.
  TransmissivityProfile prof({1.0, 0.0, 0.0, 1.0, 0.5, 0.0, 1.0}, 1.0, 0.0);
  std::vector<double> truth{0.1, 0.4, 0.3, 0.2};
  auto a = build_coding_matrix(prof, 0, 4, 4, true);
  auto s = series_of(std::vector<double>(4, 1.0));
  s.normalized = a.apply(truth);
  Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(s.normalized->data(), 4);
  Eigen::VectorXd direct = a.dense().fullPivLu().solve(b);
  auto got = solve_signal(prof, s, 0, 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(direct(i)).epsilon(1e-9));
    CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(truth[static_cast<std::size_t>(i)]).epsilon(1e-6));
  }
}

TEST_CASE("noiseless recovery is exact at every start") {
  Scene scene(kInf, 0.0);
  auto truth = unit_sum(scene.signal).values;
  for (std::size_t bit = 0; bit < 249; ++bit) {
    auto p = scene.truth(bit);
    auto r = recover(scene.profile, scene.scan(p, kInf, 0), scene.templ);
    REQUIRE(r.position == p);
    CHECK(relative_error(r.signal, truth) < 1e-6);
  }
}

TEST_CASE("recovery residual properties on noisy scans") {
  Scene scene(0.2295, 20.0);
  RecoveryOptions one;
  one.max_rounds = 1;
  RecoveryOptions five;
  five.max_rounds = 5;
  for (std::size_t bit = 0; bit < 249; bit += 11) {
    auto p = scene.truth(bit);
    auto s = scene.scan(p, 10.0, derive_seed({3, bit}));
    auto r1 = recover(scene.profile, s, scene.templ, one);
    auto r3 = recover(scene.profile, s, scene.templ);
    auto r5 = recover(scene.profile, s, scene.templ, five);
    CHECK(r1.iterations == 1);
    CHECK(r3.iterations <= 3);
    CHECK(r3.residual <= r1.residual + 1e-12);
    CHECK(r5.residual <= r3.residual + 1e-12);
    // Never worse than the template at the true offset.
    CHECK(r3.residual <= objective(scene.profile, s, p, scene.templ.values) + 1e-12);

    // KKT at the returned shape.
    auto a = build_coding_matrix(scene.profile, r3.position, s.size(), 10, true).dense();
    Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(r3.signal.data(), 10);
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(s.normalized->data(),
                                                          static_cast<Eigen::Index>(s.size()));
    Eigen::VectorXd w = a.transpose() * (d - a * x);
    for (int j = 0; j < 10; ++j) {
      CHECK(x(j) >= 0.0);
      CHECK(w(j) <= 1e-8);
      CHECK(std::abs(x(j) * w(j)) <= 1e-8);
    }
  }
  CHECK_THROWS_AS(recover(scene.profile, scene.scan(0, kInf, 0), scene.templ, RecoveryOptions{0}),
                  ParameterError);
}
