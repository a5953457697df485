#include "hiacc/rng.hpp"

#include <cmath>

#include "hiacc/errors.hpp"

namespace hiacc {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

Rng Rng::derive(std::uint64_t stream) const {
  return Rng(mix64(seed_ ^ mix64(stream + 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double Rng::normal() { return normal_(engine_); }

double Rng::exponential() { return -std::log(uniform_open()); }

double Rng::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || mean > 30.0) {
    throw DomainError("poisson inversion supports 0 <= mean <= 30");
  }
  const double u = uniform();
  double term = std::exp(-mean);
  double cdf = term;
  std::uint64_t k = 0;
  // The tail mass beyond k = 200 is below double resolution for mean <= 30.
  while (u >= cdf && k < 200) {
    ++k;
    term *= mean / static_cast<double>(k);
    cdf += term;
  }
  return k;
}

}  // namespace hiacc
