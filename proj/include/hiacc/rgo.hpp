#pragma once

#include <cstdint>

#include "hiacc/fors.hpp"
#include "hiacc/oracles.hpp"
#include "hiacc/potential.hpp"

namespace hiacc {

/// The Gaussian tilt nu(x) proportional to exp(-f(x) - |x - x0|^2 / (2 eta)).
struct TiltProblem {
  Potential potential;
  Vector x0;
  double eta = 0.0;

  void validate() const;
};

/// Exact law of a tilt whose potential carries a GaussianReference:
/// per coordinate precision lambda + 1/eta and mean
/// (lambda m + x0/eta) / (lambda + 1/eta). Throws DomainError otherwise.
GaussianReference gaussian_tilt_law(const TiltProblem& tp);

/// Proposal centre and estimator settings for one tilt. The linear tilt
/// u = (x0 - xhat)/eta is derived on construction.
class RgoContext {
 public:
  RgoContext(const TiltProblem& tp, Vector xhat, double B, std::uint64_t n_batch, double M = 1.0,
             double eps_prox = 0.0);

  const Vector& x0() const noexcept { return x0_; }
  const Vector& xhat() const noexcept { return xhat_; }
  const Vector& u() const noexcept { return u_; }
  double eta() const noexcept { return eta_; }
  double B() const noexcept { return B_; }
  std::uint64_t n_batch() const noexcept { return n_batch_; }
  double M() const noexcept { return M_; }
  double eps_prox() const noexcept { return eps_prox_; }
  int dim() const noexcept { return static_cast<int>(x0_.size()); }

 private:
  Vector x0_;
  Vector xhat_;
  Vector u_;
  double eta_;
  double B_;
  std::uint64_t n_batch_;
  double M_;
  double eps_prox_;
};

/// Clamp to [-B, B].
double pclip(double w, double B);

struct PathPoint {
  Vector gamma;
  Vector gamma_dot;
};

/// gamma_r = a x + (1 - a) xhat + b z and its r-derivative
/// a'(x - xhat) + b' z, with a = sin(pi r/2), b = cos(pi r/2).
/// Throws DomainError for r outside [0, 1].
PathPoint path_gamma(const Vector& x, const Vector& xhat, const Vector& z, double r);

/// One clipped draw of <gamma_dot, u - g> with r ~ U[0,1], z ~ N(0, eta I)
/// and g a batch gradient at gamma_r. Uses n_batch gradient queries.
double first_order_w(const RgoContext& ctx, const Vector& x, StochasticGradient& oracle,
                     Rng& rng);

/// One clipped draw of v' - v - <u, z - x> with z ~ N(xhat, eta I), v and v'
/// batch values at x and z. Uses 2 n_batch value queries.
double zeroth_order_w(const RgoContext& ctx, const Vector& x, ValueOracle& oracle, Rng& rng);

/// Draws from nu by rejection from N(xhat, eta I) using first_order_w.
ForsResult sample_tilt(const RgoContext& ctx, StochasticGradient& oracle, const ForsConfig& cfg,
                       Rng& rng);

/// Draws from nu by rejection from N(xhat, eta I) using zeroth_order_w.
ForsResult sample_tilt(const RgoContext& ctx, ValueOracle& oracle, const ForsConfig& cfg,
                       Rng& rng);

/// Step-size rule for a single tilt. The inverse step is
/// C_step * [(beta^2 d^s L + s beta^2 d^{s-1} L^2)^{1/(1+s)} + extra^2 L],
/// L = log(1/delta), where extra^2 is M^2 + eps_prox^2 (first order) or
/// eps_prox^2 (zeroth order).
struct TiltConstants {
  double C_step = 64.0;
  double B = 1.0;
};

struct TiltPlan {
  double delta = 0.0;
  double eta = 0.0;
  double M = 0.0;
  std::uint64_t n_batch = 1;
  double eps_prox = 0.0;
  /// delta + 4 eps_n(M) (first order) or delta + 10 eps_n(B/3) (zeroth order).
  double tv_bound = 0.0;
};

double tilt_inverse_step(const Potential& p, double delta, double extra_sq,
                         const TiltConstants& k);

/// First order with n = 1: M is the smallest level >= m_1 with
/// 4 eps_1(M) <= delta, eps_prox = 10 (m_s + M), and eta is additionally
/// capped at 1/(2 m_s) so the proximal iteration contracts.
TiltPlan plan_tilt_first_order(const Potential& p, const NoiseModel& noise, double delta,
                               const TiltConstants& k = {});

/// Zeroth order with xhat = x0: eps_prox = |grad f(x0)| and n is the smallest
/// batch with 10 eps_n(B/3) <= delta.
TiltPlan plan_tilt_zeroth_order(const Potential& p, const NoiseModel& noise, const Vector& x0,
                                double delta, const TiltConstants& k = {});

}  // namespace hiacc
