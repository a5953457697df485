#include "hiacc/fors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hiacc {

void ForsConfig::validate() const {
  if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("clipping level B must be positive");
  if (max_attempts == 0) throw DomainError("max_attempts must be positive");
  if (max_w_per_call == 0) throw DomainError("max_w_per_call must be positive");
}

ForsResult fors_sample(const ProposalSampler& proposal, const EstimatorSource& estimator,
                       const ForsConfig& cfg, Rng& rng, QueryLedger& ledger) {
  cfg.validate();
  const double two_b = 2.0 * cfg.B;
  ForsResult out;
  while (out.attempts < cfg.max_attempts) {
    ++out.attempts;
    ++ledger.fors_attempts;
    Vector x = proposal(rng);
    if (!x.allFinite()) throw NumericError("proposal produced a non-finite point");
    const double u = rng.uniform();
    const std::uint64_t j = rng.poisson(two_b);
    double prod = 1.0;
    bool accepted = true;
    for (std::uint64_t i = 0; i < j; ++i) {
      if (out.w_draws >= cfg.max_w_per_call) {
        throw BudgetExhausted("rejection sampler exceeded " + std::to_string(cfg.max_w_per_call) +
                                  " estimator draws in one call",
                              ledger);
      }
      const double w = estimator(x, rng);
      ++out.w_draws;
      ++ledger.w_draws;
      if (!(std::abs(w) <= cfg.B)) {
        throw DomainError("estimator draw " + std::to_string(w) + " outside [-B, B]");
      }
      prod *= (cfg.B + w) / two_b;
      if (prod <= u) {
        accepted = false;
        break;
      }
    }
    if (accepted) {
      out.x = std::move(x);
      return out;
    }
  }
  throw BudgetExhausted(
      "rejection sampler exceeded " + std::to_string(cfg.max_attempts) + " attempts", ledger);
}

void DiscreteDist::validate() const {
  if (support.empty()) throw DomainError("discrete distribution has empty support");
  if (support.size() != weights.size()) throw DomainError("support and weights differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("weights must sum to 1");
}

double DiscreteDist::mean() const {
  return std::inner_product(support.begin(), support.end(), weights.begin(), 0.0);
}

double DiscreteDist::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < support.size(); ++i) {
    acc += weights[i];
    if (u < acc) return support[i];
  }
  return support.back();
}

double acceptance_probability(const DiscreteDist& w, double B) {
  w.validate();
  if (!(B > 0.0)) throw DomainError("B must be positive");
  for (double v : w.support) {
    if (!(std::abs(v) <= B)) throw DomainError("W support leaves [-B, B]");
  }
  return std::exp(w.mean() - B);
}

double fors_wdraw_bound(double B, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(B > 0.0)) throw DomainError("B must be positive");
  return 3.0 * B * std::exp(2.0 * B) * std::log(2.0 / delta);
}

WdrawCheck wdraw_tail_check(double B, double delta, const std::vector<std::uint64_t>& counts) {
  if (counts.empty()) throw DomainError("no per-call draw counts supplied");
  WdrawCheck out;
  out.bound = fors_wdraw_bound(B, delta);
  std::vector<std::uint64_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  // Smallest value with at least a (1 - delta) fraction of calls at or below it.
  const auto need = static_cast<std::size_t>(
      std::ceil((1.0 - delta) * static_cast<double>(sorted.size()) - 1e-9));
  const std::size_t idx = need == 0 ? 0 : std::min(need, sorted.size()) - 1;
  out.quantile = static_cast<double>(sorted[idx]);
  out.pass = out.quantile <= out.bound;
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  const double t = static_cast<double>(sorted.size());
  out.aggregate_constant = total / (B * std::exp(2.0 * B) * (t + std::log(1.0 / delta)));
  return out;
}

}  // namespace hiacc
