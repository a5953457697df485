#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hiacc/potential.hpp"

namespace hiacc {

/// A one-dimensional reference law given by its CDF and quantile function.
struct Law1D {
  std::string name;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
};

Law1D normal_law(double mean, double sd);

/// Coordinate i of every point.
std::vector<double> marginal(const std::vector<Vector>& points, int i);

struct TvEstimate {
  double tv = 0.0;
  int bins = 0;
  std::size_t n = 0;
  /// sqrt(bins / (2 n)), the usual bound on the upward bias of the plug-in.
  double bias_bound = 0.0;
};

/// Half the L1 distance between empirical and reference masses over `bins`
/// equal-mass bins of the reference law. Needs at least 100 samples.
TvEstimate empirical_tv_1d(const std::vector<double>& samples, const Law1D& law, int bins = 50);

/// Two-sample variant with equal-mass bins of the pooled sample. Symmetric.
TvEstimate empirical_tv_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                   int bins = 50);

/// Exact TV between N(m1, sd^2) and N(m2, sd^2): 2 Phi(|m1 - m2| / (2 sd)) - 1.
double gaussian_tv(double m1, double m2, double sd = 1.0);

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
  double dof = 0.0;  // chi-square tests only
};

/// Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// One-sample Kolmogorov-Smirnov test with the asymptotic p-value at
/// lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D. Needs at least 100 finite
/// samples; order of input is irrelevant.
TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Pearson goodness of fit of category counts to probabilities. Categories
/// with zero probability must have zero counts.
TestResult chi_square_gof(const std::vector<std::uint64_t>& counts,
                          const std::vector<double>& probs);

/// Pearson homogeneity test for two count vectors over the same categories.
TestResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                 const std::vector<std::uint64_t>& b);

/// Normalized q(x) exp(w(x)) over a finite support.
std::vector<double> discrete_law_oracle(const std::vector<double>& q,
                                        const std::vector<double>& w_means);

/// Least-squares slope of log y against log x. Needs at least 4 positive
/// pairs and a non-degenerate x range.
double scaling_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// Thresholds shared by every statistical acceptance check.
inline constexpr double kSignificance = 0.01;
inline constexpr int kSeeds = 20;
inline constexpr int kSeedsRequired = 18;

/// True when at least `required` of the flags are set.
bool enough_passes(const std::vector<bool>& passes, int required = kSeedsRequired);

/// Binomial standard error sqrt(p (1 - p) / n).
double binomial_se(double p, std::size_t n);

}  // namespace hiacc
