#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hiacc/potential.hpp"
#include "hiacc/rng.hpp"

namespace hiacc {

/// Tail family of the additive noise in a stochastic oracle.
///
/// Concrete generators (the tail assumptions only constrain functionals):
///  - SubGaussian(sigma): isotropic Gaussian, per-coordinate std sigma/sqrt(d).
///  - SubWeibull(zeta, sigma), zeta != 2: uniform direction times a norm
///    R = sigma * (E/2)^{1/zeta}, E ~ Exp(1), so E exp((R/sigma)^zeta) = 2.
///    For zeta = 1 the norm is Gamma(1, sigma/2).
///  - PolyMoment(k, sigma): uniform direction times a Pareto norm with shape
///    2k+1, scaled so that E|noise|^{2k} = sigma^{2k}.
///  - TwoPoint(p, shift), one-dimensional: -shift + p*shift with probability
///    p, p*shift otherwise (zero mean).
struct NoiseModel {
  enum class Family { Exact, SubGaussian, SubWeibull, PolyMoment, TwoPoint };

  Family family = Family::Exact;
  double sigma = 0.0;
  double zeta = 2.0;
  int k = 1;
  double p = 0.0;
  double shift = 0.0;

  static NoiseModel exact();
  static NoiseModel sub_gaussian(double sigma);
  /// zeta == 2 yields the SubGaussian family.
  static NoiseModel sub_weibull(double zeta, double sigma);
  static NoiseModel poly_moment(int k, double sigma);
  static NoiseModel two_point(double p, double shift);

  std::string describe() const;
  const char* key() const;
};

/// Absolute constants in the sub-Weibull tail bound C exp(-c (M/sigma)^zeta).
struct TailConstants {
  double C = 2.0;
  double c = 0.25;
};

/// Mean deviation E|g - E g| of a single draw (m_1 in the oracle assumption).
double mean_abs_deviation(const NoiseModel& noise, int dim);

/// Root second moment sqrt(E|g - E g|^2) of a single draw.
double rms_deviation(const NoiseModel& noise);

/// Draws one zero-mean noise vector of length `dim`.
Vector draw_noise(const NoiseModel& noise, int dim, Rng& rng);

/// Adds one noise draw to `acc` in place; `scratch` is reused workspace.
void add_noise(const NoiseModel& noise, Rng& rng, Vector& acc, Vector& scratch);

/// Upper bound on (1/M) E[|g - Eg| 1{|g - Eg| > M}] for the batch-n oracle.
/// Returns min(family bound, rms/(sqrt(n) M)); the second term always holds.
/// SubWeibull with zeta != 2 and n > 1 throws UnsupportedCombination.
double eps_tail(const NoiseModel& noise, std::uint64_t n, double M, const TailConstants& tc = {});

/// Smallest n >= 1 with eps_tail(noise, n, M) <= delta / 10.
std::uint64_t phi(const NoiseModel& noise, double M, double delta, const TailConstants& tc = {});

/// Smallest M >= floor (to 1e-12 relative) with eps_tail(noise, n, M) <= target.
double smallest_truncation_level(const NoiseModel& noise, std::uint64_t n, double target,
                                 double floor, const TailConstants& tc = {});

inline constexpr std::uint64_t kPhiCap = 1'000'000'000ULL;

/// Cumulative oracle and algorithm counters. Per-chain ledgers merge by
/// addition.
struct QueryLedger {
  std::uint64_t grad_queries = 0;
  std::uint64_t value_queries = 0;
  std::uint64_t fors_attempts = 0;
  std::uint64_t w_draws = 0;
  std::uint64_t prox_iters = 0;
  std::uint64_t rgo_calls = 0;
  std::uint64_t prox_failures = 0;

  QueryLedger& operator+=(const QueryLedger& other);
  bool operator==(const QueryLedger&) const = default;
};

/// Source of unbiased stochastic gradients. Every draw is metered.
class StochasticGradient {
 public:
  virtual ~StochasticGradient() = default;

  virtual int dim() const = 0;

  Vector draw(const Vector& x);
  /// Average of n i.i.d. draws; n == 1 returns the single draw unchanged.
  Vector draw_batch(const Vector& x, std::uint64_t n);

  QueryLedger& ledger() noexcept { return *ledger_; }

 protected:
  explicit StochasticGradient(QueryLedger& ledger) : ledger_(&ledger) {}
  virtual Vector sample(const Vector& x) = 0;
  /// Mean of n unmetered samples; overridable when it can be done cheaper.
  virtual Vector sample_mean(const Vector& x, std::uint64_t n);

 private:
  QueryLedger* ledger_;
};

/// grad f(x) plus noise from a NoiseModel, on its own random stream.
class GradientOracle final : public StochasticGradient {
 public:
  GradientOracle(Potential potential, NoiseModel noise, Rng stream, QueryLedger& ledger);

  int dim() const override { return potential_.dim(); }
  const Potential& potential() const noexcept { return potential_; }
  const NoiseModel& noise() const noexcept { return noise_; }
  double m1() const noexcept { return m1_; }

 protected:
  Vector sample(const Vector& x) override;
  Vector sample_mean(const Vector& x, std::uint64_t n) override;

 private:
  Potential potential_;
  NoiseModel noise_;
  Rng rng_;
  double m1_;
  Vector scratch_;
};

/// f(x) plus scalar noise, on its own random stream.
class ValueOracle {
 public:
  ValueOracle(Potential potential, NoiseModel noise, Rng stream, QueryLedger& ledger);

  int dim() const { return potential_.dim(); }
  double draw(const Vector& x);
  double draw_batch(const Vector& x, std::uint64_t n);

  const Potential& potential() const noexcept { return potential_; }
  const NoiseModel& noise() const noexcept { return noise_; }
  QueryLedger& ledger() noexcept { return *ledger_; }

 private:
  Potential potential_;
  NoiseModel noise_;
  Rng rng_;
  QueryLedger* ledger_;
  Vector acc_;
  Vector scratch_;
};

/// Catalog construction from a key ("exact", "subgaussian", "subweibull",
/// "polymoment", "twopoint") and parameters (sigma, zeta, k, p, shift).
NoiseModel make_noise(const std::string& key, const std::map<std::string, double>& params);
std::vector<std::string> noise_catalog();

}  // namespace hiacc
