#include "hiacc/oracles.hpp"

#include <cmath>
#include <sstream>

#include "hiacc/errors.hpp"

namespace hiacc {

NoiseModel NoiseModel::exact() { return NoiseModel{}; }

NoiseModel NoiseModel::sub_gaussian(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sub-Gaussian sigma must be > 0");
  NoiseModel m;
  m.family = Family::SubGaussian;
  m.sigma = sigma;
  m.zeta = 2.0;
  return m;
}

NoiseModel NoiseModel::sub_weibull(double zeta, double sigma) {
  if (!(zeta > 0.0)) throw DomainError("sub-Weibull zeta must be > 0");
  if (zeta == 2.0) return sub_gaussian(sigma);
  if (!(sigma > 0.0)) throw DomainError("sub-Weibull sigma must be > 0");
  NoiseModel m;
  m.family = Family::SubWeibull;
  m.sigma = sigma;
  m.zeta = zeta;
  return m;
}

NoiseModel NoiseModel::poly_moment(int k, double sigma) {
  if (k < 1) throw DomainError("moment order k must be >= 1");
  if (!(sigma > 0.0)) throw DomainError("moment scale sigma must be > 0");
  NoiseModel m;
  m.family = Family::PolyMoment;
  m.k = k;
  m.sigma = sigma;
  return m;
}

NoiseModel NoiseModel::two_point(double p, double shift) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("two-point p must lie in (0, 1]");
  if (!(shift > 0.0)) throw DomainError("two-point shift must be > 0");
  NoiseModel m;
  m.family = Family::TwoPoint;
  m.p = p;
  m.shift = shift;
  return m;
}

const char* NoiseModel::key() const {
  switch (family) {
    case Family::Exact:
      return "exact";
    case Family::SubGaussian:
      return "subgaussian";
    case Family::SubWeibull:
      return "subweibull";
    case Family::PolyMoment:
      return "polymoment";
    case Family::TwoPoint:
      return "twopoint";
  }
  return "?";
}

std::string NoiseModel::describe() const {
  std::ostringstream os;
  os << key();
  switch (family) {
    case Family::Exact:
      break;
    case Family::SubGaussian:
      os << "(sigma=" << sigma << ")";
      break;
    case Family::SubWeibull:
      os << "(zeta=" << zeta << ", sigma=" << sigma << ")";
      break;
    case Family::PolyMoment:
      os << "(k=" << k << ", sigma=" << sigma << ")";
      break;
    case Family::TwoPoint:
      os << "(p=" << p << ", shift=" << shift << ")";
      break;
  }
  return os.str();
}

namespace {

double pareto_scale(int k, double sigma) {
  return sigma * std::pow(2.0 * k + 1.0, -1.0 / (2.0 * k));
}

double pareto_shape(int k) { return 2.0 * k + 1.0; }

// Writes a uniformly random unit vector into `out` (length fixed by caller).
void random_direction(Rng& rng, Vector& out) {
  if (out.size() == 1) {
    out[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return;
  }
  double n2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
    n2 = out.squaredNorm();
  } while (n2 == 0.0);
  out /= std::sqrt(n2);
}

double log_factorial(int m) { return std::lgamma(m + 1.0); }

}  // namespace

double mean_abs_deviation(const NoiseModel& noise, int dim) {
  using F = NoiseModel::Family;
  switch (noise.family) {
    case F::Exact:
      return 0.0;
    case F::SubGaussian: {
      const double d = dim;
      return noise.sigma / std::sqrt(d) * std::sqrt(2.0) *
             std::exp(std::lgamma((d + 1.0) / 2.0) - std::lgamma(d / 2.0));
    }
    case F::SubWeibull:
      return noise.sigma * std::pow(2.0, -1.0 / noise.zeta) * std::tgamma(1.0 + 1.0 / noise.zeta);
    case F::PolyMoment: {
      const double a = pareto_shape(noise.k);
      return pareto_scale(noise.k, noise.sigma) * a / (a - 1.0);
    }
    case F::TwoPoint:
      return 2.0 * noise.p * (1.0 - noise.p) * noise.shift;
  }
  return 0.0;
}

double rms_deviation(const NoiseModel& noise) {
  using F = NoiseModel::Family;
  switch (noise.family) {
    case F::Exact:
      return 0.0;
    case F::SubGaussian:
      return noise.sigma;
    case F::SubWeibull:
      return noise.sigma * std::pow(2.0, -1.0 / noise.zeta) *
             std::sqrt(std::tgamma(1.0 + 2.0 / noise.zeta));
    case F::PolyMoment: {
      const double a = pareto_shape(noise.k);
      return pareto_scale(noise.k, noise.sigma) * std::sqrt(a / (a - 2.0));
    }
    case F::TwoPoint:
      return noise.shift * std::sqrt(noise.p * (1.0 - noise.p));
  }
  return 0.0;
}

void add_noise(const NoiseModel& noise, Rng& rng, Vector& acc, Vector& scratch) {
  using F = NoiseModel::Family;
  const auto dim = acc.size();
  switch (noise.family) {
    case F::Exact:
      return;
    case F::SubGaussian: {
      const double sd = noise.sigma / std::sqrt(static_cast<double>(dim));
      for (Eigen::Index i = 0; i < dim; ++i) acc[i] += sd * rng.normal();
      return;
    }
    case F::SubWeibull: {
      const double r = noise.sigma * std::pow(0.5 * rng.exponential(), 1.0 / noise.zeta);
      scratch.resize(dim);
      random_direction(rng, scratch);
      acc += r * scratch;
      return;
    }
    case F::PolyMoment: {
      const double r = pareto_scale(noise.k, noise.sigma) *
                       std::pow(rng.uniform_open(), -1.0 / pareto_shape(noise.k));
      scratch.resize(dim);
      random_direction(rng, scratch);
      acc += r * scratch;
      return;
    }
    case F::TwoPoint: {
      if (dim != 1) throw DimensionError("two-point noise is one-dimensional");
      const bool hit = rng.uniform() < noise.p;
      acc[0] += noise.p * noise.shift - (hit ? noise.shift : 0.0);
      return;
    }
  }
}

Vector draw_noise(const NoiseModel& noise, int dim, Rng& rng) {
  Vector acc = Vector::Zero(dim);
  Vector scratch(dim);
  add_noise(noise, rng, acc, scratch);
  return acc;
}

double eps_tail(const NoiseModel& noise, std::uint64_t n, double M, const TailConstants& tc) {
  using F = NoiseModel::Family;
  if (n < 1) throw DomainError("eps_tail: n must be >= 1");
  if (!(M > 0.0)) throw DomainError("eps_tail: M must be > 0");
  if (noise.family == F::Exact) return 0.0;

  const double nn = static_cast<double>(n);
  const double generic = rms_deviation(noise) / (std::sqrt(nn) * M);
  double family_bound = generic;
  switch (noise.family) {
    case F::Exact:
      break;
    case F::SubGaussian:
      if (std::sqrt(nn) * M >= noise.sigma) {
        const double t = M / noise.sigma;
        family_bound = tc.C * std::exp(-tc.c * nn * t * t);
      }
      break;
    case F::SubWeibull:
      if (n > 1) {
        throw UnsupportedCombination(
            "eps_tail: no batch tail formula for sub-Weibull noise with zeta != 2 and n > 1");
      }
      if (M >= noise.sigma) {
        family_bound = tc.C * std::exp(-tc.c * std::pow(M / noise.sigma, noise.zeta));
      }
      break;
    case F::PolyMoment: {
      const double k = noise.k;
      const double log_bound = log_factorial(2 * noise.k) + 2.0 * k * std::log(noise.sigma) -
                               k * std::log(nn) - 2.0 * k * std::log(M);
      family_bound = std::exp(log_bound);
      break;
    }
    case F::TwoPoint: {
      const double var = noise.shift * noise.shift * noise.p * (1.0 - noise.p);
      family_bound = var / (nn * M * M);
      break;
    }
  }
  return std::min(family_bound, generic);
}

std::uint64_t phi(const NoiseModel& noise, double M, double delta, const TailConstants& tc) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("phi: delta must lie in (0, 1)");
  // Relative slack absorbs rounding in the closed forms (2/200 vs 0.1/10).
  const double target = delta / 10.0 * (1.0 + 1e-12);
  if (eps_tail(noise, 1, M, tc) <= target) return 1;
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (eps_tail(noise, hi, M, tc) > target) {
    lo = hi;
    if (hi > kPhiCap / 2) {
      throw InfeasibleSchedule("phi: batch size exceeds cap for " + noise.describe() +
                               " at M=" + std::to_string(M) + ", delta=" + std::to_string(delta));
    }
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (eps_tail(noise, mid, M, tc) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double smallest_truncation_level(const NoiseModel& noise, std::uint64_t n, double target,
                                 double floor, const TailConstants& tc) {
  if (!(target > 0.0)) throw DomainError("truncation search: target must be positive");
  if (!(floor > 0.0)) throw DomainError("truncation search: floor must be positive");
  if (eps_tail(noise, n, floor, tc) <= target) return floor;
  double lo = floor;
  double hi = 2.0 * floor;
  while (eps_tail(noise, n, hi, tc) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw InfeasibleSchedule("truncation search diverged for " + noise.describe());
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (eps_tail(noise, n, mid, tc) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

QueryLedger& QueryLedger::operator+=(const QueryLedger& o) {
  grad_queries += o.grad_queries;
  value_queries += o.value_queries;
  fors_attempts += o.fors_attempts;
  w_draws += o.w_draws;
  prox_iters += o.prox_iters;
  rgo_calls += o.rgo_calls;
  prox_failures += o.prox_failures;
  return *this;
}

Vector StochasticGradient::draw(const Vector& x) {
  require_dim(x, dim(), "gradient oracle input");
  ++ledger_->grad_queries;
  return sample(x);
}

Vector StochasticGradient::draw_batch(const Vector& x, std::uint64_t n) {
  if (n < 1) throw DomainError("batch size must be >= 1");
  if (n == 1) return draw(x);
  require_dim(x, dim(), "gradient oracle input");
  ledger_->grad_queries += n;
  return sample_mean(x, n);
}

Vector StochasticGradient::sample_mean(const Vector& x, std::uint64_t n) {
  Vector acc = Vector::Zero(dim());
  for (std::uint64_t i = 0; i < n; ++i) acc += sample(x);
  return acc / static_cast<double>(n);
}

GradientOracle::GradientOracle(Potential potential, NoiseModel noise, Rng stream,
                               QueryLedger& ledger)
    : StochasticGradient(ledger),
      potential_(std::move(potential)),
      noise_(noise),
      rng_(stream),
      m1_(mean_abs_deviation(noise_, potential_.dim())) {
  if (noise_.family == NoiseModel::Family::TwoPoint && potential_.dim() != 1) {
    throw DimensionError("two-point noise is one-dimensional");
  }
}

Vector GradientOracle::sample(const Vector& x) {
  Vector g = potential_.grad(x);
  if (noise_.family != NoiseModel::Family::Exact) add_noise(noise_, rng_, g, scratch_);
  return g;
}

Vector GradientOracle::sample_mean(const Vector& x, std::uint64_t n) {
  Vector g = potential_.grad(x);
  if (noise_.family == NoiseModel::Family::Exact) return g;
  if (noise_.family == NoiseModel::Family::SubGaussian) {
    // The mean of n Gaussian draws is Gaussian with variance scaled by 1/n.
    add_noise(NoiseModel::sub_gaussian(noise_.sigma / std::sqrt(static_cast<double>(n))), rng_,
              g, scratch_);
    return g;
  }
  Vector acc = Vector::Zero(dim());
  for (std::uint64_t i = 0; i < n; ++i) add_noise(noise_, rng_, acc, scratch_);
  return g + acc / static_cast<double>(n);
}

ValueOracle::ValueOracle(Potential potential, NoiseModel noise, Rng stream, QueryLedger& ledger)
    : potential_(std::move(potential)),
      noise_(noise),
      rng_(stream),
      ledger_(&ledger),
      acc_(Vector::Zero(1)),
      scratch_(1) {}

double ValueOracle::draw(const Vector& x) {
  double v = potential_.value(x);
  ++ledger_->value_queries;
  if (noise_.family != NoiseModel::Family::Exact) {
    acc_[0] = 0.0;
    add_noise(noise_, rng_, acc_, scratch_);
    v += acc_[0];
  }
  return v;
}

double ValueOracle::draw_batch(const Vector& x, std::uint64_t n) {
  if (n < 1) throw DomainError("batch size must be >= 1");
  if (n == 1) return draw(x);
  const double fx = potential_.value(x);
  acc_[0] = 0.0;
  if (noise_.family == NoiseModel::Family::SubGaussian) {
    add_noise(NoiseModel::sub_gaussian(noise_.sigma / std::sqrt(static_cast<double>(n))), rng_,
              acc_, scratch_);
    ledger_->value_queries += n;
    return fx + acc_[0];
  }
  if (noise_.family != NoiseModel::Family::Exact) {
    for (std::uint64_t i = 0; i < n; ++i) add_noise(noise_, rng_, acc_, scratch_);
  }
  ledger_->value_queries += n;
  return fx + acc_[0] / static_cast<double>(n);
}

namespace {

double param(const std::map<std::string, double>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw DomainError("noise parameter '" + key + "' is required");
  return it->second;
}

}  // namespace

NoiseModel make_noise(const std::string& key, const std::map<std::string, double>& params) {
  if (key == "exact") return NoiseModel::exact();
  if (key == "subgaussian") return NoiseModel::sub_gaussian(param(params, "sigma"));
  if (key == "subweibull") return NoiseModel::sub_weibull(param(params, "zeta"), param(params, "sigma"));
  if (key == "polymoment") {
    const double k = param(params, "k");
    if (k != std::floor(k)) throw DomainError("polymoment k must be an integer");
    return NoiseModel::poly_moment(static_cast<int>(k), param(params, "sigma"));
  }
  if (key == "twopoint") return NoiseModel::two_point(param(params, "p"), param(params, "shift"));
  throw DomainError("unknown noise key '" + key + "'");
}

std::vector<std::string> noise_catalog() {
  return {"exact", "subgaussian", "subweibull", "polymoment", "twopoint"};
}

}  // namespace hiacc
