#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hiacc/oracles.hpp"
#include "hiacc/rng.hpp"
#include "hiacc/sampler.hpp"

namespace hiacc {

/// Increasing moment function with psi(0) = 0: m^s (s >= 1) or
/// exp(m^s) - 1 (s > 0).
struct PsiFunction {
  enum class Kind { Power, ExpPower };
  Kind kind = Kind::Power;
  double s = 2.0;

  static PsiFunction power(double s);
  static PsiFunction exp_power(double s);

  double operator()(double m) const;
  std::string describe() const;
};

/// sup{u >= delta : delta psi(u) <= (1 - psi(delta)) u}, by bisection on
/// [delta, 1e12]. Throws InfeasibleSchedule when psi(delta) >= 1 or the set
/// is empty.
double f_psi(const PsiFunction& psi, double delta);

/// Largest query budget T with T < F_psi(delta) / 10.
std::uint64_t max_budget_below_bound(const PsiFunction& psi, double delta);

/// Gradient oracle for f_theta(x) = (x - theta)^2 / 2 on the real line that
/// returns x - shift with probability p and x otherwise, so its mean is
/// x - p shift. Every query consumes exactly one uniform from its coupling
/// stream, whatever p is, so two instances on copies of one stream see the
/// same uniform at the same query index.
class ShiftOracle final : public StochasticGradient {
 public:
  ShiftOracle(double p, double shift, Rng coupling, QueryLedger& ledger);

  int dim() const override { return 1; }
  std::uint64_t corruptions() const noexcept { return corruptions_; }

 protected:
  Vector sample(const Vector& x) override;

 private:
  double p_;
  double shift_;
  Rng rng_;
  std::uint64_t corruptions_ = 0;
};

/// The two-point family used by the separation argument: O_0 is exact for
/// f_0, O_delta returns x - M with probability p (M = delta / p), which is
/// unbiased for f_delta.
struct AdversarialOraclePair {
  PsiFunction psi;
  double delta = 0.0;
  double p = 0.0;
  double M = 0.0;

  /// Uses the least corruption probability p = delta / F_psi(delta).
  static AdversarialOraclePair build(const PsiFunction& psi, double delta);
  /// Explicit p; checks p psi(M - delta) + (1 - p) psi(delta) <= 1.
  static AdversarialOraclePair with_p(const PsiFunction& psi, double delta, double p);

  /// p psi(M - delta) + (1 - p) psi(delta).
  double psi_moment() const;
};

/// Wraps an oracle with a hard query budget; the query past the budget
/// throws BudgetViolation.
class BudgetedGradient final : public StochasticGradient {
 public:
  BudgetedGradient(StochasticGradient& inner, std::uint64_t budget);

  int dim() const override { return inner_->dim(); }
  std::uint64_t used() const noexcept { return used_; }
  std::uint64_t remaining() const noexcept { return budget_ - used_; }

 protected:
  Vector sample(const Vector& x) override;
  Vector sample_mean(const Vector& x, std::uint64_t n) override;

 private:
  StochasticGradient* inner_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
  QueryLedger own_;
};

/// A sampling algorithm that makes at most `budget` gradient queries and
/// returns one point.
class SamplingAlgorithm {
 public:
  virtual ~SamplingAlgorithm() = default;
  virtual std::string name() const = 0;
  /// Must not mutate the adapter: trials run concurrently.
  virtual Vector run(BudgetedGradient& oracle, Rng& rng) const = 0;
};

/// Proximal sampler from mu0 = N(0, 1) on the unit-curvature Gaussian family,
/// for at most sched.N transitions. A query that would overrun the budget
/// abandons the current transition and returns the last completed state.
class ProximalSamplerAdapter final : public SamplingAlgorithm {
 public:
  explicit ProximalSamplerAdapter(Schedule sched);
  std::string name() const override { return "proximal_sampler"; }
  Vector run(BudgetedGradient& oracle, Rng& rng) const override;

  const Schedule& schedule() const noexcept { return sched_; }

 private:
  Schedule sched_;
  Potential model_;
};

/// Stochastic-gradient Langevin from mu0 = N(0, 1):
/// x <- x - h g + sqrt(2 h) xi, one query per step until the budget is spent.
class SgldAdapter final : public SamplingAlgorithm {
 public:
  explicit SgldAdapter(double step = 0.5);
  std::string name() const override { return "sgld"; }
  Vector run(BudgetedGradient& oracle, Rng& rng) const override;

 private:
  double h_;
};

struct CoupledRunResult {
  std::string algorithm;
  std::uint64_t T = 0;
  std::uint64_t trials = 0;
  double p = 0.0;
  double M = 0.0;
  std::vector<double> out0;      // arm driven by O_0
  std::vector<double> out_delta; // arm driven by O_delta
  double corrupted_fraction = 0.0;
  double differing_fraction = 0.0;
  /// Binned two-sample TV between the arms.
  double tv_arms = 0.0;
  /// T p, the coupling bound on TV between the arms, and its binomial SE at
  /// `trials`.
  double coupling_bound = 0.0;
  double coupling_se = 0.0;
  /// True when some trial had no corruption but different outputs.
  bool coupling_broken = false;
};

/// Runs `alg` against both oracles of `pair` for each trial, sharing the
/// algorithm stream and the coupling stream between arms. Trial t uses
/// Rng(seed).derive(t).
CoupledRunResult coupled_run(SamplingAlgorithm& alg, const AdversarialOraclePair& pair,
                             std::uint64_t T, std::uint64_t trials, std::uint64_t seed,
                             unsigned threads = 0);

}  // namespace hiacc
