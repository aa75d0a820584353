#include "codap/random.hpp"

#include <cmath>

#include "codap/error.hpp"

namespace codap {

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (auto p : parts) h = mix64(h ^ mix64(p));
  return h;
}

namespace {

constexpr double kInversionLimit = 30.0;

std::int64_t poisson_inversion(double mean, CounterRng& rng) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  // The cap only matters when rounding keeps cdf just below u.
  while (u > cdf && k < 1000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

std::int64_t poisson_ptrs(double mean, CounterRng& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

std::int64_t sample_poisson(double mean, CounterRng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ParameterError("Poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;
  return mean < kInversionLimit ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

}  // namespace codap
