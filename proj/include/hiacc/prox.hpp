#pragma once

#include <cstdint>

#include "hiacc/oracles.hpp"
#include "hiacc/potential.hpp"

namespace hiacc {

/// Settings for the approximate proximal point
/// argmin_x f(x) + |x - x0|^2 / (2 eta), computed from stochastic gradients.
struct ProxConfig {
  double eta = 0.0;
  /// Noise truncation level; sets the tolerance 10 (m_s + M).
  double M = 1.0;
  std::uint64_t n_batch = 1;
  /// A priori bound on |grad f(x0)|.
  double G = 1.0;
  std::uint64_t k_iters = 1;

  /// Rejects eta > 1/(2 m_s), nonpositive parameters, and k_iters below the
  /// contraction threshold for (G, M). Throws ValidationError listing all
  /// problems.
  void validate(const Potential& p) const;
};

/// ceil(10 log(4 G / (M + m_s))) + 1, at least 1.
std::uint64_t default_prox_iters(double G, double M, double m_s);

/// ProxConfig with k_iters = default_prox_iters(G, M, m_s).
ProxConfig make_prox_config(const Potential& p, double eta, double M, std::uint64_t n_batch,
                            double G);

/// Residual tolerance 10 (m_s + M), in units of eta.
double prox_tolerance(const Potential& p, double M);

/// Runs X_{k+1} = (X_k - eta g_k + x0) / 2 from X_0 = x0 for k_iters steps,
/// g_k a batch gradient at X_k. Uses exactly n_batch * k_iters queries.
/// Throws NumericError on a non-finite iterate.
Vector approx_prox(const Potential& p, StochasticGradient& oracle, const Vector& x0,
                   const ProxConfig& cfg);

/// |xhat + eta grad f(xhat) - x0| with the analytic gradient. Not metered.
double prox_residual(const Potential& p, const Vector& xhat, const Vector& x0, double eta);

}  // namespace hiacc
