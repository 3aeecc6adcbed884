#include "wdmqkd/random.hpp"

#include <cmath>
#include <stdexcept>

namespace wdmqkd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream derive_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t channel,
                     std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(domain));
  h = splitmix64(h ^ channel);
  h = splitmix64(h ^ index);
  return Stream(h);
}

namespace {

std::uint64_t poisson_inversion(double mean, Stream& stream) {
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double prod = stream.uniform();
  while (prod > limit) {
    ++k;
    prod *= stream.uniform();
  }
  return k;
}

std::uint64_t poisson_ptrs(double mean, Stream& stream) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = stream.uniform() - 0.5;
    const double v = stream.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t sample_poisson(double mean, Stream& stream) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("sample_poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  return mean < 10.0 ? poisson_inversion(mean, stream) : poisson_ptrs(mean, stream);
}

}  // namespace wdmqkd
