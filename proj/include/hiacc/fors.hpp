#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hiacc/errors.hpp"
#include "hiacc/oracles.hpp"
#include "hiacc/rng.hpp"

namespace hiacc {

/// Limits for the first-order rejection sampler.
struct ForsConfig {
  /// Clipping level: every estimator draw must lie in [-B, B].
  double B = 1.0;
  /// Proposals tried before giving up with BudgetExhausted.
  std::uint64_t max_attempts = 1'000'000;
  /// Estimator draws allowed in a single call.
  std::uint64_t max_w_per_call = 1'000'000;

  /// Throws DomainError unless B is positive and finite and caps are nonzero.
  void validate() const;
};

/// Thrown when a rejection sampler runs out of attempts or draws.
/// Carries the ledger snapshot at the point of failure.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& what, QueryLedger partial)
      : Error(what), partial_(partial) {}
  const QueryLedger& partial() const noexcept { return partial_; }

 private:
  QueryLedger partial_;
};

struct ForsResult {
  Vector x;
  std::uint64_t attempts = 0;
  std::uint64_t w_draws = 0;
};

/// Draws a candidate from the proposal law q.
using ProposalSampler = std::function<Vector(Rng&)>;
/// Given a candidate x, returns one draw of a bounded estimator W of w(x).
using EstimatorSource = std::function<double(const Vector& x, Rng&)>;

/// Samples from the law proportional to q(x) exp(E[W | x]).
///
/// Each attempt draws x ~ q, J ~ Poisson(2B) and accepts with probability
/// prod_{j<=J} (B + W_j)/(2B). The product is compared against a uniform drawn
/// up front, and the attempt stops at the first factor that pushes it below;
/// since each factor is at most one, this has the same acceptance law while
/// skipping draws on rejected attempts. An estimator draw outside [-B, B]
/// throws DomainError.
ForsResult fors_sample(const ProposalSampler& proposal, const EstimatorSource& estimator,
                       const ForsConfig& cfg, Rng& rng, QueryLedger& ledger);

/// Finite distribution: support points with nonnegative weights summing to 1.
struct DiscreteDist {
  std::vector<double> support;
  std::vector<double> weights;

  double mean() const;
  double sample(Rng& rng) const;
  /// Throws DomainError on empty, mismatched, negative or unnormalized input.
  void validate() const;
};

/// Exact per-attempt acceptance exp(E W - B) for i.i.d. W from `w`.
/// Throws DomainError if the support leaves [-B, B].
double acceptance_probability(const DiscreteDist& w, double B);

/// Draw-count bound 3 B e^{2B} log(2/delta): with probability at least
/// 1 - delta a call uses no more W draws than this.
double fors_wdraw_bound(double B, double delta);

struct WdrawCheck {
  double quantile = 0.0;  // empirical (1 - delta)-quantile of per-call draws
  double bound = 0.0;
  bool pass = false;
  /// Total draws / (B e^{2B} (T + log(1/delta))), the constant implied by the
  /// run for the aggregate bound. Reported, never asserted.
  double aggregate_constant = 0.0;
};

/// Compares the empirical (1 - delta)-quantile of per-call W draws against
/// fors_wdraw_bound. Throws DomainError on empty input.
WdrawCheck wdraw_tail_check(double B, double delta, const std::vector<std::uint64_t>& counts);

}  // namespace hiacc
