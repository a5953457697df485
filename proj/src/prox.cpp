#include "hiacc/prox.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hiacc/errors.hpp"

namespace hiacc {

namespace {

double iteration_threshold(double G, double M, double m_s) {
  return 10.0 * std::log(4.0 * G / (M + m_s));
}

}  // namespace

std::uint64_t default_prox_iters(double G, double M, double m_s) {
  if (!(G > 0.0) || !(M > 0.0) || !(m_s >= 0.0)) {
    throw DomainError("prox iterations need G > 0, M > 0, m_s >= 0");
  }
  const double t = std::ceil(iteration_threshold(G, M, m_s));
  return t < 0.0 ? 1 : static_cast<std::uint64_t>(t) + 1;
}

void ProxConfig::validate(const Potential& p) const {
  std::vector<std::string> problems;
  if (!(eta > 0.0) || !std::isfinite(eta)) problems.emplace_back("prox.eta must be positive");
  if (!(M > 0.0)) problems.emplace_back("prox.M must be positive");
  if (!(G > 0.0)) problems.emplace_back("prox.G must be positive");
  if (n_batch < 1) problems.emplace_back("prox.n_batch must be >= 1");
  if (k_iters < 1) problems.emplace_back("prox.k_iters must be >= 1");
  const double m_s = p.m_s();
  if (eta > 0.0 && m_s > 0.0 && eta > 0.5 / m_s * (1.0 + 1e-12)) {
    problems.emplace_back("prox.eta = " + std::to_string(eta) +
                          " violates eta <= 1/(2 m_s) = " + std::to_string(0.5 / m_s));
  }
  if (M > 0.0 && G > 0.0) {
    const double need = std::ceil(iteration_threshold(G, M, m_s));
    if (static_cast<double>(k_iters) < need) {
      problems.emplace_back("prox.k_iters = " + std::to_string(k_iters) + " is below " +
                            std::to_string(static_cast<long long>(need)) +
                            " = ceil(10 log(4G/(M + m_s)))");
    }
  }
  if (!problems.empty()) throw ValidationError(problems);
}

ProxConfig make_prox_config(const Potential& p, double eta, double M, std::uint64_t n_batch,
                            double G) {
  ProxConfig cfg;
  cfg.eta = eta;
  cfg.M = M;
  cfg.n_batch = n_batch;
  cfg.G = G;
  cfg.k_iters = default_prox_iters(G, M, p.m_s());
  return cfg;
}

double prox_tolerance(const Potential& p, double M) { return 10.0 * (p.m_s() + M); }

Vector approx_prox(const Potential& p, StochasticGradient& oracle, const Vector& x0,
                   const ProxConfig& cfg) {
  cfg.validate(p);
  require_dim(x0, p.dim(), "prox centre x0");
  if (oracle.dim() != p.dim()) throw DimensionError("oracle and potential dimensions differ");
  Vector x = x0;
  for (std::uint64_t k = 0; k < cfg.k_iters; ++k) {
    const Vector g = oracle.draw_batch(x, cfg.n_batch);
    x = 0.5 * (x - cfg.eta * g + x0);
    ++oracle.ledger().prox_iters;
    if (!x.allFinite()) {
      throw NumericError("prox iterate became non-finite at step " + std::to_string(k));
    }
  }
  return x;
}

double prox_residual(const Potential& p, const Vector& xhat, const Vector& x0, double eta) {
  return (xhat + eta * p.grad(xhat) - x0).norm();
}

}  // namespace hiacc
