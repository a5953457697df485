#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hiacc {

using Vector = Eigen::VectorXd;

/// Throws DimensionError unless `x` has length `dim` and finite entries.
void require_dim(const Vector& x, int dim, const char* what);

/// Product-form Gaussian law, attached to quadratic potentials so that tests
/// can compare samples with exact marginals.
struct GaussianReference {
  Vector mean;
  Vector precisions;  // per coordinate

  double marginal_sd(int i) const;
  double marginal_cdf(int i, double x) const;
  double marginal_pdf(int i, double x) const;
  double density(const Vector& x) const;
};

/// Value and gradient of f, where the target density is proportional to
/// exp(-f).
class PotentialModel {
 public:
  virtual ~PotentialModel() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector grad(const Vector& x) const = 0;
};

/// Target potential with analytic gradient and assumption metadata.
///
/// Immutable once built; copies share the underlying model.
class Potential {
 public:
  Potential(std::string name, int dim, std::shared_ptr<const PotentialModel> model,
            double holder_s, double holder_beta);

  static Potential from_functions(std::string name, int dim,
                                  std::function<double(const Vector&)> value,
                                  std::function<Vector(const Vector&)> grad,
                                  double holder_s, double holder_beta);

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }

  double value(const Vector& x) const;
  Vector grad(const Vector& x) const;

  double holder_s() const noexcept { return holder_s_; }
  double holder_beta() const noexcept { return holder_beta_; }
  /// beta_s^{1/(1+s)}, the natural length^-1 scale of the potential.
  double m_s() const;

  std::optional<double> slc_alpha() const noexcept { return slc_alpha_; }
  /// Declared log-Sobolev constant, else 1/alpha when strongly log-concave.
  std::optional<double> lsi_const() const;
  /// Declared Poincare constant, else the log-Sobolev constant.
  std::optional<double> pi_const() const;
  const std::optional<GaussianReference>& reference() const noexcept { return reference_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }

  // Builders return a modified copy. Inconsistent metadata (LSI constant above
  // 1/alpha, PI constant above the LSI constant) is rejected.
  Potential with_slc_alpha(double alpha) const;
  Potential with_lsi_const(double c) const;
  Potential with_pi_const(double c) const;
  Potential with_reference(GaussianReference ref) const;
  Potential with_params(std::map<std::string, double> params) const;

 private:
  void check_constants() const;

  std::string name_;
  int dim_;
  std::shared_ptr<const PotentialModel> model_;
  double holder_s_;
  double holder_beta_;
  std::optional<double> slc_alpha_;
  std::optional<double> lsi_const_;
  std::optional<double> pi_const_;
  std::optional<GaussianReference> reference_;
  std::map<std::string, double> params_;
};

/// f(x) = precision/2 * |x - mean|^2; s = 1, beta = alpha = precision.
Potential make_gaussian_potential(const Vector& mean, double precision);

/// f(x) = sum_i precisions_i/2 * (x_i - mean_i)^2.
Potential make_anisotropic_gaussian_potential(const Vector& mean, const Vector& precisions);

/// One-dimensional pseudo-Huber potential f(x) = scale * (sqrt(1 + x^2) - 1).
/// The gradient takes values in (-scale, scale), so it is Hoelder with s = 0
/// and beta_0 = 2 * scale. Exponential tails: Poincare but not log-Sobolev.
Potential make_huber_potential(double scale);

/// One-dimensional quartic-core potential: f(x) = x^4/4 for |x| <= R, C^1
/// continued by a quadratic beyond R so the gradient stays Lipschitz with
/// beta_1 = 3 R^2. Log-concave but not strongly log-concave.
Potential make_quartic_potential(double core_radius);

/// f identically zero in dimension `dim`. Not a probability target; used as a
/// degenerate tilt in tests.
Potential make_flat_potential(int dim);

/// Maximum over pairs of |grad(x) - grad(y)| / (beta_s |x - y|^s). A value at
/// most 1 means no Hoelder violation was witnessed.
double holder_spot_check(const Potential& p, const std::vector<std::pair<Vector, Vector>>& pairs);

/// Which functional inequality the sampler schedule relies on.
struct AssumptionCase {
  enum class Tag { LSI, PI, LC };

  Tag tag = Tag::LSI;
  double constant = 1.0;      // C_LSI or C_PI; unused for LC
  double warm_start = 0.0;    // Delta >= log(1 + chi^2(mu0 || mu))
  std::optional<double> w2_bound;  // W2(mu0, mu), LC only

  static AssumptionCase lsi(double c_lsi, double warm_start);
  static AssumptionCase pi(double c_pi, double warm_start);
  static AssumptionCase lc(double w2, double warm_start);

  void validate() const;
};

const char* to_string(AssumptionCase::Tag tag);

/// Catalog lookup: builds a potential from a key ("gaussian",
/// "anisotropic_gaussian", "huber", "quartic", "flat") and a parameter map.
/// Vector-valued parameters ("mean", "precisions") are passed as lists.
struct PotentialSpec {
  std::string key;
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> lists;
};

Potential make_potential(const PotentialSpec& spec);
std::vector<std::string> potential_catalog();

}  // namespace hiacc
