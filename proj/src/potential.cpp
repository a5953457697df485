#include "hiacc/potential.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "hiacc/errors.hpp"

namespace hiacc {

void require_dim(const Vector& x, int dim, const char* what) {
  if (x.size() != dim) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(dim) +
                         ", got " + std::to_string(x.size()));
  }
  if (!x.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite coordinate");
  }
}

double GaussianReference::marginal_sd(int i) const { return 1.0 / std::sqrt(precisions[i]); }

double GaussianReference::marginal_cdf(int i, double x) const {
  return boost::math::cdf(boost::math::normal(mean[i], marginal_sd(i)), x);
}

double GaussianReference::marginal_pdf(int i, double x) const {
  return boost::math::pdf(boost::math::normal(mean[i], marginal_sd(i)), x);
}

double GaussianReference::density(const Vector& x) const {
  double out = 1.0;
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    out *= marginal_pdf(static_cast<int>(i), x[i]);
  }
  return out;
}

namespace {

class FunctionModel final : public PotentialModel {
 public:
  FunctionModel(std::function<double(const Vector&)> value, std::function<Vector(const Vector&)> grad)
      : value_(std::move(value)), grad_(std::move(grad)) {}
  double value(const Vector& x) const override { return value_(x); }
  Vector grad(const Vector& x) const override { return grad_(x); }

 private:
  std::function<double(const Vector&)> value_;
  std::function<Vector(const Vector&)> grad_;
};

class QuadraticModel final : public PotentialModel {
 public:
  QuadraticModel(Vector mean, Vector precisions)
      : mean_(std::move(mean)), precisions_(std::move(precisions)) {}
  double value(const Vector& x) const override {
    return 0.5 * (precisions_.array() * (x - mean_).array().square()).sum();
  }
  Vector grad(const Vector& x) const override {
    return (precisions_.array() * (x - mean_).array()).matrix();
  }

 private:
  Vector mean_;
  Vector precisions_;
};

class HuberModel final : public PotentialModel {
 public:
  explicit HuberModel(double scale) : scale_(scale) {}
  double value(const Vector& x) const override {
    return scale_ * (std::sqrt(1.0 + x[0] * x[0]) - 1.0);
  }
  Vector grad(const Vector& x) const override {
    Vector g(1);
    g[0] = scale_ * x[0] / std::sqrt(1.0 + x[0] * x[0]);
    return g;
  }

 private:
  double scale_;
};

class QuarticModel final : public PotentialModel {
 public:
  explicit QuarticModel(double radius) : r_(radius) {}
  double value(const Vector& x) const override {
    const double a = std::abs(x[0]);
    if (a <= r_) return 0.25 * a * a * a * a;
    const double t = a - r_;
    return 0.25 * r_ * r_ * r_ * r_ + r_ * r_ * r_ * t + 1.5 * r_ * r_ * t * t;
  }
  Vector grad(const Vector& x) const override {
    const double a = std::abs(x[0]);
    const double sign = x[0] < 0.0 ? -1.0 : 1.0;
    Vector g(1);
    if (a <= r_) {
      g[0] = x[0] * x[0] * x[0];
    } else {
      g[0] = sign * (r_ * r_ * r_ + 3.0 * r_ * r_ * (a - r_));
    }
    return g;
  }

 private:
  double r_;
};

class FlatModel final : public PotentialModel {
 public:
  explicit FlatModel(int dim) : dim_(dim) {}
  double value(const Vector&) const override { return 0.0; }
  Vector grad(const Vector&) const override { return Vector::Zero(dim_); }

 private:
  int dim_;
};

}  // namespace

Potential::Potential(std::string name, int dim, std::shared_ptr<const PotentialModel> model,
                     double holder_s, double holder_beta)
    : name_(std::move(name)),
      dim_(dim),
      model_(std::move(model)),
      holder_s_(holder_s),
      holder_beta_(holder_beta) {
  if (dim_ < 1) throw DomainError("potential dimension must be >= 1");
  if (!model_) throw DomainError("potential model is null");
  if (!(holder_s_ >= 0.0 && holder_s_ <= 1.0)) throw DomainError("holder_s must lie in [0, 1]");
  if (!(holder_beta_ >= 0.0) || !std::isfinite(holder_beta_)) {
    throw DomainError("holder_beta must be finite and >= 0");
  }
}

Potential Potential::from_functions(std::string name, int dim,
                                    std::function<double(const Vector&)> value,
                                    std::function<Vector(const Vector&)> grad, double holder_s,
                                    double holder_beta) {
  return Potential(std::move(name), dim,
                   std::make_shared<FunctionModel>(std::move(value), std::move(grad)), holder_s,
                   holder_beta);
}

double Potential::value(const Vector& x) const {
  require_dim(x, dim_, "Potential::value");
  return model_->value(x);
}

Vector Potential::grad(const Vector& x) const {
  require_dim(x, dim_, "Potential::grad");
  return model_->grad(x);
}

double Potential::m_s() const { return std::pow(holder_beta_, 1.0 / (1.0 + holder_s_)); }

std::optional<double> Potential::lsi_const() const {
  if (lsi_const_) return lsi_const_;
  if (slc_alpha_) return 1.0 / *slc_alpha_;
  return std::nullopt;
}

std::optional<double> Potential::pi_const() const {
  if (pi_const_) return pi_const_;
  return lsi_const();
}

void Potential::check_constants() const {
  constexpr double slack = 1e-12;
  if (slc_alpha_ && lsi_const_ && *lsi_const_ > (1.0 / *slc_alpha_) * (1.0 + slack)) {
    throw DomainError("lsi_const exceeds 1/slc_alpha");
  }
  const auto lsi = lsi_const();
  if (pi_const_ && lsi && *pi_const_ > *lsi * (1.0 + slack)) {
    throw DomainError("pi_const exceeds lsi_const");
  }
}

Potential Potential::with_slc_alpha(double alpha) const {
  if (!(alpha > 0.0)) throw DomainError("slc_alpha must be > 0");
  Potential out = *this;
  out.slc_alpha_ = alpha;
  out.check_constants();
  return out;
}

Potential Potential::with_lsi_const(double c) const {
  if (!(c > 0.0)) throw DomainError("lsi_const must be > 0");
  Potential out = *this;
  out.lsi_const_ = c;
  out.check_constants();
  return out;
}

Potential Potential::with_pi_const(double c) const {
  if (!(c > 0.0)) throw DomainError("pi_const must be > 0");
  Potential out = *this;
  out.pi_const_ = c;
  out.check_constants();
  return out;
}

Potential Potential::with_reference(GaussianReference ref) const {
  if (ref.mean.size() != dim_ || ref.precisions.size() != dim_) {
    throw DimensionError("reference dimension mismatch");
  }
  Potential out = *this;
  out.reference_ = std::move(ref);
  return out;
}

Potential Potential::with_params(std::map<std::string, double> params) const {
  Potential out = *this;
  out.params_ = std::move(params);
  return out;
}

Potential make_gaussian_potential(const Vector& mean, double precision) {
  if (!(precision > 0.0) || !std::isfinite(precision)) {
    throw DomainError("gaussian precision must be positive and finite");
  }
  const int d = static_cast<int>(mean.size());
  require_dim(mean, d, "make_gaussian_potential mean");
  return make_anisotropic_gaussian_potential(mean, Vector::Constant(d, precision));
}

Potential make_anisotropic_gaussian_potential(const Vector& mean, const Vector& precisions) {
  const int d = static_cast<int>(mean.size());
  if (d < 1) throw DimensionError("gaussian mean must be nonempty");
  require_dim(precisions, d, "gaussian precisions");
  if ((precisions.array() <= 0.0).any()) throw DomainError("gaussian precisions must be > 0");
  const double hi = precisions.maxCoeff();
  const double lo = precisions.minCoeff();
  return Potential("gaussian", d, std::make_shared<QuadraticModel>(mean, precisions), 1.0, hi)
      .with_slc_alpha(lo)
      .with_reference(GaussianReference{mean, precisions});
}

Potential make_huber_potential(double scale) {
  if (!(scale > 0.0)) throw DomainError("huber scale must be > 0");
  return Potential("huber", 1, std::make_shared<HuberModel>(scale), 0.0, 2.0 * scale)
      .with_params({{"scale", scale}});
}

Potential make_quartic_potential(double core_radius) {
  if (!(core_radius > 0.0)) throw DomainError("quartic core radius must be > 0");
  return Potential("quartic", 1, std::make_shared<QuarticModel>(core_radius), 1.0,
                   3.0 * core_radius * core_radius)
      .with_params({{"core_radius", core_radius}});
}

Potential make_flat_potential(int dim) {
  return Potential("flat", dim, std::make_shared<FlatModel>(dim), 1.0, 0.0);
}

double holder_spot_check(const Potential& p, const std::vector<std::pair<Vector, Vector>>& pairs) {
  if (pairs.empty()) throw DomainError("holder_spot_check needs at least one pair");
  double worst = 0.0;
  for (const auto& [x, y] : pairs) {
    const double dist = (x - y).norm();
    if (!(dist > 0.0)) throw DomainError("holder_spot_check pairs must be distinct");
    const double lhs = (p.grad(x) - p.grad(y)).norm();
    const double rhs = p.holder_beta() * std::pow(dist, p.holder_s());
    double ratio;
    if (rhs > 0.0) {
      ratio = lhs / rhs;
    } else {
      ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    worst = std::max(worst, ratio);
  }
  return worst;
}

AssumptionCase AssumptionCase::lsi(double c_lsi, double warm_start) {
  AssumptionCase c{Tag::LSI, c_lsi, warm_start, std::nullopt};
  c.validate();
  return c;
}

AssumptionCase AssumptionCase::pi(double c_pi, double warm_start) {
  AssumptionCase c{Tag::PI, c_pi, warm_start, std::nullopt};
  c.validate();
  return c;
}

AssumptionCase AssumptionCase::lc(double w2, double warm_start) {
  AssumptionCase c{Tag::LC, 0.0, warm_start, w2};
  c.validate();
  return c;
}

void AssumptionCase::validate() const {
  if (!(warm_start >= 0.0) || !std::isfinite(warm_start)) {
    throw DomainError("warm_start must be finite and >= 0");
  }
  switch (tag) {
    case Tag::LSI:
    case Tag::PI:
      if (!(constant > 0.0) || !std::isfinite(constant)) {
        throw DomainError(std::string(to_string(tag)) + " case needs a positive constant");
      }
      break;
    case Tag::LC:
      if (!w2_bound || !(*w2_bound >= 0.0)) throw DomainError("LC case needs w2_bound >= 0");
      break;
  }
}

const char* to_string(AssumptionCase::Tag tag) {
  switch (tag) {
    case AssumptionCase::Tag::LSI:
      return "lsi";
    case AssumptionCase::Tag::PI:
      return "pi";
    case AssumptionCase::Tag::LC:
      return "lc";
  }
  return "?";
}

namespace {

double scalar_or(const PotentialSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.scalars.find(key);
  return it == spec.scalars.end() ? fallback : it->second;
}

Vector vector_param(const PotentialSpec& spec, const std::string& key, int dim, double fallback) {
  if (const auto it = spec.lists.find(key); it != spec.lists.end()) {
    return Eigen::Map<const Vector>(it->second.data(), static_cast<Eigen::Index>(it->second.size()));
  }
  return Vector::Constant(dim, scalar_or(spec, key, fallback));
}

int spec_dim(const PotentialSpec& spec, const std::string& vector_key) {
  if (const auto it = spec.lists.find(vector_key); it != spec.lists.end()) {
    return static_cast<int>(it->second.size());
  }
  const double d = scalar_or(spec, "dim", 1.0);
  if (d < 1.0 || d != std::floor(d)) throw DomainError("dim must be a positive integer");
  return static_cast<int>(d);
}

}  // namespace

Potential make_potential(const PotentialSpec& spec) {
  if (spec.key == "gaussian") {
    const int d = spec_dim(spec, "mean");
    return make_gaussian_potential(vector_param(spec, "mean", d, 0.0),
                                   scalar_or(spec, "precision", 1.0));
  }
  if (spec.key == "anisotropic_gaussian") {
    const int d = spec_dim(spec, "mean");
    return make_anisotropic_gaussian_potential(vector_param(spec, "mean", d, 0.0),
                                               vector_param(spec, "precisions", d, 1.0));
  }
  if (spec.key == "huber") {
    Potential p = make_huber_potential(scalar_or(spec, "scale", 0.5));
    if (const auto it = spec.scalars.find("pi_const"); it != spec.scalars.end()) {
      p = p.with_pi_const(it->second);
    }
    return p;
  }
  if (spec.key == "quartic") {
    Potential p = make_quartic_potential(scalar_or(spec, "core_radius", 2.0));
    if (const auto it = spec.scalars.find("pi_const"); it != spec.scalars.end()) {
      p = p.with_pi_const(it->second);
    }
    return p;
  }
  if (spec.key == "flat") {
    return make_flat_potential(spec_dim(spec, "mean"));
  }
  throw DomainError("unknown potential key '" + spec.key + "'");
}

std::vector<std::string> potential_catalog() {
  return {"gaussian", "anisotropic_gaussian", "huber", "quartic", "flat"};
}

}  // namespace hiacc
