#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hiacc/errors.hpp"
#include "hiacc/fors.hpp"
#include "hiacc/oracles.hpp"
#include "hiacc/potential.hpp"
#include "hiacc/prox.hpp"
#include "hiacc/rgo.hpp"

namespace hiacc {

enum class Mode { FirstOrder, ZerothOrder };
const char* to_string(Mode mode);

/// Absolute constants left unspecified by the complexity bounds. Defaults are
/// calibrated on the one-dimensional standard Gaussian so that the measured
/// TV at delta = 0.05 stays below delta, then frozen.
struct PlanConstants {
  /// C in the step-size rule 1/(C eta) = ...
  double eta_const = 1.0;
  /// Multiplier on the iteration-count formula.
  double steps_const = 4.0;
  /// Estimator clipping level for first- and zeroth-order tilts.
  double fors_B_first = 1.0;
  double fors_B_zeroth = 3.0;
  TailConstants tail{};
  /// Log-spaced candidates for the truncation level M, from
  /// max(m_1, 1e-3 m_s) up to m_grid_span times that.
  int m_grid_points = 81;
  double m_grid_span = 1e4;
  std::uint64_t max_attempts = 1'000'000;
  std::uint64_t max_w_per_call = 1'000'000;

  std::string to_json() const;
  static PlanConstants from_json(const std::string& text);
};

/// A fully resolved run plan for the proximal sampler.
struct Schedule {
  Mode mode = Mode::FirstOrder;
  AssumptionCase assumption{};
  double delta = 0.0;
  double eta = 0.0;
  std::uint64_t N = 0;
  double M = 1.0;
  std::uint64_t n_batch = 1;
  double eps_prox = 0.0;
  double G = 1.0;
  std::uint64_t k_iters = 1;
  double B = 1.0;
  /// N * n * (k_iters + 2 B e^B): proximal iterations plus a typical number
  /// of estimator draws per step, times the batch size.
  double planned_queries = 0.0;
  PlanConstants constants{};

  /// Serializes every field plus the plan constants; `seed` is embedded when
  /// given.
  std::string to_json(std::optional<std::uint64_t> seed = std::nullopt) const;
  static Schedule from_json(const std::string& text);
};

/// log(1 + chi^2) between product Gaussians N(m0, s0^2 I) and N(m, s^2 I) in
/// `dim` coordinates, i.e. an exact warm-start parameter. Requires
/// 2 s^2 > s0^2.
double gaussian_warm_start(double m0, double s0, double m, double s, int dim);

/// Gradient-norm bound G with G^2 = 64 beta^{2/(1+s)} d^{-(1-s)/(1+s)}
/// (Delta + d + log(1/fail)).
double gradient_norm_bound(const Potential& p, double warm_start, double fail);

/// First-order plan at a fixed truncation level M.
Schedule plan_first_order_at(const Potential& p, const NoiseModel& noise,
                             const AssumptionCase& assumption, double delta, double M,
                             const PlanConstants& k = {});

/// First-order plan minimising planned_queries over the M grid. Throws
/// InfeasibleSchedule when no grid point admits a batch size.
Schedule plan_first_order(const Potential& p, const NoiseModel& noise,
                          const AssumptionCase& assumption, double delta,
                          const PlanConstants& k = {});

/// Zeroth-order plan with xhat = y, M = 1 and n = phi(noise, 1, delta/(4N)).
Schedule plan_zeroth_order(const Potential& p, const NoiseModel& noise,
                           const AssumptionCase& assumption, double delta,
                           const PlanConstants& k = {});

/// A chain failure, tagged with where it happened.
class ChainFailure : public Error {
 public:
  ChainFailure(std::uint64_t chain, std::uint64_t step, const std::string& what)
      : Error("chain " + std::to_string(chain) + ", step " + std::to_string(step) + ": " + what),
        chain_(chain),
        step_(step) {}
  std::uint64_t chain() const noexcept { return chain_; }
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t chain_;
  std::uint64_t step_;
};

/// One proximal-sampler transition: Y ~ N(x, eta I), then X' from the tilt at
/// Y via the approximate prox point and the first-order estimator.
Vector proximal_step(const Potential& p, StochasticGradient& oracle, const Schedule& sched,
                     const Vector& x, Rng& rng);

/// Zeroth-order transition with xhat = Y.
Vector proximal_step(const Potential& p, ValueOracle& oracle, const Schedule& sched,
                     const Vector& x, Rng& rng);

/// Runs sched.N transitions from x0. `on_step`, when set, runs after each
/// completed transition with the step index and current state.
using StepHook = std::function<void(std::uint64_t step, const Vector& x)>;
Vector run_chain(const Potential& p, StochasticGradient& oracle, const Schedule& sched,
                 Vector x0, Rng& rng, const StepHook& on_step = {});
Vector run_chain(const Potential& p, ValueOracle& oracle, const Schedule& sched, Vector x0,
                 Rng& rng, const StepHook& on_step = {});

using InitialSampler = std::function<Vector(Rng&)>;

struct RunOptions {
  std::uint64_t seed = 0;
  std::uint64_t chains = 1;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct SamplerOutput {
  std::vector<Vector> samples;  // final state per chain, in chain order
  QueryLedger ledger;           // sum over chains
  std::vector<QueryLedger> chain_ledgers;
};

/// Independent chains. Chain c uses Rng(seed).derive(c) with child streams 0
/// (initial state), 1 (oracle noise) and 2 (algorithm). Output is identical
/// for any thread count.
SamplerOutput run_proximal_sampler(const Potential& p, const NoiseModel& noise,
                                   const Schedule& sched, const InitialSampler& mu0,
                                   const RunOptions& opts);

/// Runs fn(i) for i in [0, count) on at most `threads` workers. The first
/// exception (lowest index) is rethrown after all workers stop.
void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& fn);

}  // namespace hiacc
