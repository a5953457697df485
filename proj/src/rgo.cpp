#include "hiacc/rgo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hiacc/errors.hpp"

namespace hiacc {

void TiltProblem::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("tilt: eta must be positive");
  require_dim(x0, potential.dim(), "tilt centre x0");
}

GaussianReference gaussian_tilt_law(const TiltProblem& tp) {
  tp.validate();
  const auto& ref = tp.potential.reference();
  if (!ref) throw DomainError("tilt law is only available for Gaussian potentials");
  GaussianReference out;
  out.precisions = ref->precisions.array() + 1.0 / tp.eta;
  out.mean = (ref->precisions.array() * ref->mean.array() + tp.x0.array() / tp.eta) /
             out.precisions.array();
  return out;
}

RgoContext::RgoContext(const TiltProblem& tp, Vector xhat, double B, std::uint64_t n_batch,
                       double M, double eps_prox)
    : x0_(tp.x0),
      xhat_(std::move(xhat)),
      eta_(tp.eta),
      B_(B),
      n_batch_(n_batch),
      M_(M),
      eps_prox_(eps_prox) {
  tp.validate();
  require_dim(xhat_, tp.potential.dim(), "proposal centre xhat");
  if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("B must be positive");
  if (n_batch < 1) throw DomainError("n_batch must be >= 1");
  if (!(M > 0.0)) throw DomainError("M must be positive");
  if (!(eps_prox >= 0.0)) throw DomainError("eps_prox must be nonnegative");
  u_ = (x0_ - xhat_) / eta_;
}

double pclip(double w, double B) { return std::max(-B, std::min(B, w)); }

PathPoint path_gamma(const Vector& x, const Vector& xhat, const Vector& z, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("path parameter r must lie in [0, 1]");
  const double h = 0.5 * std::numbers::pi;
  const double a = std::sin(h * r);
  const double b = std::cos(h * r);
  PathPoint out;
  out.gamma = a * x + (1.0 - a) * xhat + b * z;
  out.gamma_dot = (h * b) * (x - xhat) - (h * a) * z;
  return out;
}

namespace {

Vector gaussian_vector(int dim, double sd, Rng& rng) {
  Vector z(dim);
  for (int i = 0; i < dim; ++i) z[i] = sd * rng.normal();
  return z;
}

}  // namespace

double first_order_w(const RgoContext& ctx, const Vector& x, StochasticGradient& oracle,
                     Rng& rng) {
  const double r = rng.uniform();
  const Vector z = gaussian_vector(ctx.dim(), std::sqrt(ctx.eta()), rng);
  const PathPoint pt = path_gamma(x, ctx.xhat(), z, r);
  const Vector g = oracle.draw_batch(pt.gamma, ctx.n_batch());
  return pclip(pt.gamma_dot.dot(ctx.u() - g), ctx.B());
}

double zeroth_order_w(const RgoContext& ctx, const Vector& x, ValueOracle& oracle, Rng& rng) {
  const Vector z = ctx.xhat() + gaussian_vector(ctx.dim(), std::sqrt(ctx.eta()), rng);
  const double v = oracle.draw_batch(x, ctx.n_batch());
  const double v_prime = oracle.draw_batch(z, ctx.n_batch());
  return pclip(v_prime - v - ctx.u().dot(z - x), ctx.B());
}

namespace {

ProposalSampler tilt_proposal(const RgoContext& ctx) {
  const double sd = std::sqrt(ctx.eta());
  return [&ctx, sd](Rng& rng) -> Vector {
    return ctx.xhat() + gaussian_vector(ctx.dim(), sd, rng);
  };
}

ForsConfig with_ctx_b(const ForsConfig& cfg, const RgoContext& ctx) {
  ForsConfig c = cfg;
  c.B = ctx.B();
  return c;
}

}  // namespace

ForsResult sample_tilt(const RgoContext& ctx, StochasticGradient& oracle, const ForsConfig& cfg,
                       Rng& rng) {
  if (oracle.dim() != ctx.dim()) throw DimensionError("oracle and tilt dimensions differ");
  ++oracle.ledger().rgo_calls;
  return fors_sample(
      tilt_proposal(ctx),
      [&](const Vector& x, Rng& r) { return first_order_w(ctx, x, oracle, r); },
      with_ctx_b(cfg, ctx), rng, oracle.ledger());
}

ForsResult sample_tilt(const RgoContext& ctx, ValueOracle& oracle, const ForsConfig& cfg,
                       Rng& rng) {
  if (oracle.dim() != ctx.dim()) throw DimensionError("oracle and tilt dimensions differ");
  ++oracle.ledger().rgo_calls;
  return fors_sample(
      tilt_proposal(ctx),
      [&](const Vector& x, Rng& r) { return zeroth_order_w(ctx, x, oracle, r); },
      with_ctx_b(cfg, ctx), rng, oracle.ledger());
}

double tilt_inverse_step(const Potential& p, double delta, double extra_sq,
                         const TiltConstants& k) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const double s = p.holder_s();
  const double beta = p.holder_beta();
  const double d = p.dim();
  const double L = std::log(1.0 / delta);
  const double smooth = beta * beta * std::pow(d, s) * L + s * beta * beta * std::pow(d, s - 1.0) * L * L;
  return k.C_step * (std::pow(smooth, 1.0 / (1.0 + s)) + extra_sq * L);
}

TiltPlan plan_tilt_first_order(const Potential& p, const NoiseModel& noise, double delta,
                               const TiltConstants& k) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  TiltPlan plan;
  plan.delta = delta;
  plan.n_batch = 1;
  const double m1 = mean_abs_deviation(noise, p.dim());
  const double floor = std::max(m1, 1e-6 * std::max(1.0, p.m_s()));
  plan.M = smallest_truncation_level(noise, 1, delta / 4.0, floor);
  plan.eps_prox = 10.0 * (p.m_s() + plan.M);
  const double inv =
      tilt_inverse_step(p, delta, plan.M * plan.M + plan.eps_prox * plan.eps_prox, k);
  plan.eta = 1.0 / inv;
  if (p.m_s() > 0.0) plan.eta = std::min(plan.eta, 0.5 / p.m_s());
  plan.tv_bound = delta + 4.0 * eps_tail(noise, plan.n_batch, plan.M);
  return plan;
}

TiltPlan plan_tilt_zeroth_order(const Potential& p, const NoiseModel& noise, const Vector& x0,
                                double delta, const TiltConstants& k) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  TiltPlan plan;
  plan.delta = delta;
  plan.M = k.B / 3.0;
  plan.n_batch = phi(noise, plan.M, delta);
  plan.eps_prox = p.grad(x0).norm();
  plan.eta = 1.0 / tilt_inverse_step(p, delta, plan.eps_prox * plan.eps_prox, k);
  plan.tv_bound = delta + 10.0 * eps_tail(noise, plan.n_batch, plan.M);
  return plan;
}

}  // namespace hiacc
