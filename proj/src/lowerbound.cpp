#include "hiacc/lowerbound.hpp"

#include <cmath>
#include <limits>

#include "hiacc/errors.hpp"
#include "hiacc/verify.hpp"

namespace hiacc {

PsiFunction PsiFunction::power(double s) {
  if (!(s >= 1.0)) throw DomainError("power psi needs s >= 1");
  return PsiFunction{Kind::Power, s};
}

PsiFunction PsiFunction::exp_power(double s) {
  if (!(s > 0.0)) throw DomainError("exp-power psi needs s > 0");
  return PsiFunction{Kind::ExpPower, s};
}

double PsiFunction::operator()(double m) const {
  if (!(m >= 0.0)) throw DomainError("psi is defined on [0, inf)");
  return kind == Kind::Power ? std::pow(m, s) : std::expm1(std::pow(m, s));
}

std::string PsiFunction::describe() const {
  return kind == Kind::Power ? "m^" + std::to_string(s) : "exp(m^" + std::to_string(s) + ")-1";
}

double f_psi(const PsiFunction& psi, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const double pd = psi(delta);
  if (pd >= 1.0) throw InfeasibleSchedule("psi(delta) >= 1: no feasible oracle pair");
  const auto excess = [&](double u) { return delta * psi(u) - (1.0 - pd) * u; };
  if (excess(delta) > 0.0) throw InfeasibleSchedule("F_psi: constraint fails already at u = delta");
  double lo = delta;
  double hi = 1e12;
  if (excess(hi) <= 0.0) return hi;
  for (int i = 0; i < 2000 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::uint64_t max_budget_below_bound(const PsiFunction& psi, double delta) {
  const double bound = f_psi(psi, delta) / 10.0;
  const double t = std::ceil(bound) - 1.0;
  return t <= 0.0 ? 0 : static_cast<std::uint64_t>(t);
}

ShiftOracle::ShiftOracle(double p, double shift, Rng coupling, QueryLedger& ledger)
    : StochasticGradient(ledger), p_(p), shift_(shift), rng_(coupling) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("corruption probability must lie in [0, 1]");
  if (!std::isfinite(shift)) throw DomainError("shift must be finite");
}

Vector ShiftOracle::sample(const Vector& x) {
  const double u = rng_.uniform();
  Vector g = x;
  if (u < p_) {
    g[0] -= shift_;
    ++corruptions_;
  }
  return g;
}

AdversarialOraclePair AdversarialOraclePair::build(const PsiFunction& psi, double delta) {
  const double F = f_psi(psi, delta);
  return with_p(psi, delta, delta / F);
}

AdversarialOraclePair AdversarialOraclePair::with_p(const PsiFunction& psi, double delta,
                                                    double p) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  AdversarialOraclePair pair{psi, delta, p, delta / p};
  // Bisection leaves the boundary point within rounding of the constraint.
  if (pair.psi_moment() > 1.0 + 1e-9) {
    throw InfeasibleSchedule("psi-moment " + std::to_string(pair.psi_moment()) +
                             " exceeds 1 at p = " + std::to_string(p));
  }
  return pair;
}

double AdversarialOraclePair::psi_moment() const {
  return p * psi(M - delta) + (1.0 - p) * psi(delta);
}

BudgetedGradient::BudgetedGradient(StochasticGradient& inner, std::uint64_t budget)
    : StochasticGradient(own_), inner_(&inner), budget_(budget) {}

Vector BudgetedGradient::sample(const Vector& x) { return sample_mean(x, 1); }

Vector BudgetedGradient::sample_mean(const Vector& x, std::uint64_t n) {
  if (n > budget_ - used_) {
    throw BudgetViolation("algorithm exceeded its budget of " + std::to_string(budget_) +
                          " queries");
  }
  used_ += n;
  return inner_->draw_batch(x, n);
}

namespace {

// Raised by the adapter's own meter before the hard budget would trip.
struct OutOfQueries {};

class SoftBudget final : public StochasticGradient {
 public:
  explicit SoftBudget(BudgetedGradient& inner)
      : StochasticGradient(ledger_), inner_(&inner) {}
  int dim() const override { return inner_->dim(); }

 protected:
  Vector sample(const Vector& x) override { return sample_mean(x, 1); }
  Vector sample_mean(const Vector& x, std::uint64_t n) override {
    if (n > inner_->remaining()) throw OutOfQueries{};
    return inner_->draw_batch(x, n);
  }

 private:
  QueryLedger ledger_;
  BudgetedGradient* inner_;
};

}  // namespace

ProximalSamplerAdapter::ProximalSamplerAdapter(Schedule sched)
    : sched_(std::move(sched)),
      model_(make_gaussian_potential(Vector::Zero(1), 1.0)) {
  if (sched_.mode != Mode::FirstOrder) throw DomainError("adapter needs a first-order schedule");
}

Vector ProximalSamplerAdapter::run(BudgetedGradient& oracle, Rng& rng) const {
  Vector x(1);
  x[0] = rng.normal();
  SoftBudget soft(oracle);
  for (std::uint64_t step = 0; step < sched_.N; ++step) {
    try {
      x = proximal_step(model_, soft, sched_, x, rng);
    } catch (const OutOfQueries&) {
      break;
    }
  }
  return x;
}

SgldAdapter::SgldAdapter(double step) : h_(step) {
  if (!(step > 0.0)) throw DomainError("SGLD step must be positive");
}

Vector SgldAdapter::run(BudgetedGradient& oracle, Rng& rng) const {
  Vector x(1);
  x[0] = rng.normal();
  const double sd = std::sqrt(2.0 * h_);
  while (oracle.remaining() > 0) {
    const Vector g = oracle.draw(x);
    x[0] += -h_ * g[0] + sd * rng.normal();
  }
  return x;
}

CoupledRunResult coupled_run(SamplingAlgorithm& alg, const AdversarialOraclePair& pair,
                             std::uint64_t T, std::uint64_t trials, std::uint64_t seed,
                             unsigned threads) {
  if (trials == 0) throw DomainError("coupled_run needs at least one trial");
  CoupledRunResult out;
  out.algorithm = alg.name();
  out.T = T;
  out.trials = trials;
  out.p = pair.p;
  out.M = pair.M;
  out.out0.resize(trials);
  out.out_delta.resize(trials);
  std::vector<char> corrupted(trials, 0);
  const Rng root(seed);

  parallel_for(trials, threads, [&](std::uint64_t t) {
    const Rng trial = root.derive(t);
    for (int arm = 0; arm < 2; ++arm) {
      Rng alg_rng = trial.derive(0);
      QueryLedger ledger;
      ShiftOracle oracle(arm == 0 ? 0.0 : pair.p, pair.M, trial.derive(1), ledger);
      BudgetedGradient budgeted(oracle, T);
      const double x = alg.run(budgeted, alg_rng)[0];
      if (arm == 0) {
        out.out0[t] = x;
      } else {
        out.out_delta[t] = x;
        corrupted[t] = oracle.corruptions() > 0 ? 1 : 0;
      }
    }
  });

  std::uint64_t n_corrupt = 0;
  std::uint64_t n_differ = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const bool differ = out.out0[t] != out.out_delta[t];
    n_corrupt += corrupted[t];
    n_differ += differ ? 1 : 0;
    if (differ && !corrupted[t]) out.coupling_broken = true;
  }
  const double n = static_cast<double>(trials);
  out.corrupted_fraction = n_corrupt / n;
  out.differing_fraction = n_differ / n;
  out.coupling_bound = static_cast<double>(T) * pair.p;
  out.coupling_se = binomial_se(std::min(out.coupling_bound, 1.0), trials);
  if (trials >= 100) out.tv_arms = empirical_tv_two_sample(out.out0, out.out_delta).tv;
  return out;
}

}  // namespace hiacc
