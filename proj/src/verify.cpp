#include "hiacc/verify.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hiacc/errors.hpp"

namespace hiacc {

Law1D normal_law(double mean, double sd) {
  if (!(sd > 0.0)) throw DomainError("normal law needs sd > 0");
  const boost::math::normal_distribution<double> nd(mean, sd);
  return Law1D{"N(" + std::to_string(mean) + ", " + std::to_string(sd * sd) + ")",
               [nd](double x) { return boost::math::cdf(nd, x); },
               [nd](double u) { return boost::math::quantile(nd, u); }};
}

std::vector<double> marginal(const std::vector<Vector>& points, int i) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (i < 0 || i >= p.size()) throw DimensionError("marginal index out of range");
    out.push_back(p[i]);
  }
  return out;
}

namespace {

void require_samples(const std::vector<double>& s, const char* what) {
  if (s.size() < 100) throw DomainError(std::string(what) + ": at least 100 samples required");
  for (double x : s) {
    if (!std::isfinite(x)) throw NumericError(std::string(what) + ": non-finite sample");
  }
}

// Bin index among `edges.size() + 1` bins split at sorted interior edges.
std::size_t bin_of(const std::vector<double>& edges, double x) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

}  // namespace

TvEstimate empirical_tv_1d(const std::vector<double>& samples, const Law1D& law, int bins) {
  require_samples(samples, "empirical TV");
  if (bins < 2) throw DomainError("empirical TV: at least two bins");
  std::vector<double> edges;
  for (int b = 1; b < bins; ++b) edges.push_back(law.quantile(static_cast<double>(b) / bins));
  std::vector<double> counts(bins, 0.0);
  for (double x : samples) counts[bin_of(edges, x)] += 1.0;
  const double n = static_cast<double>(samples.size());
  double l1 = 0.0;
  for (double c : counts) l1 += std::abs(c / n - 1.0 / bins);
  return TvEstimate{0.5 * l1, bins, samples.size(), std::sqrt(bins / (2.0 * n))};
}

TvEstimate empirical_tv_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                   int bins) {
  require_samples(a, "two-sample TV");
  require_samples(b, "two-sample TV");
  if (bins < 2) throw DomainError("two-sample TV: at least two bins");
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> edges;
  for (int k = 1; k < bins; ++k) {
    edges.push_back(pooled[static_cast<std::size_t>(k) * pooled.size() / bins]);
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<double> ca(edges.size() + 1, 0.0);
  std::vector<double> cb(edges.size() + 1, 0.0);
  for (double x : a) ca[bin_of(edges, x)] += 1.0;
  for (double x : b) cb[bin_of(edges, x)] += 1.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double l1 = 0.0;
  for (std::size_t k = 0; k < ca.size(); ++k) l1 += std::abs(ca[k] / na - cb[k] / nb);
  const double n = std::min(na, nb);
  return TvEstimate{0.5 * l1, static_cast<int>(ca.size()), std::min(a.size(), b.size()),
                    std::sqrt(ca.size() / n)};
}

double gaussian_tv(double m1, double m2, double sd) {
  if (!(sd > 0.0)) throw DomainError("gaussian_tv needs sd > 0");
  const boost::math::normal_distribution<double> std_normal;
  return 2.0 * boost::math::cdf(std_normal, std::abs(m1 - m2) / (2.0 * sd)) - 1.0;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series converges slowly for small lambda; use the Jacobi
  // theta form 1 - sqrt(2 pi)/lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2)).
  if (lambda < 1.0) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double j = 2.0 * k - 1.0;
      const double t = std::exp(-j * j * pi2 / (8.0 * lambda * lambda));
      s += t;
      if (t < 1e-18) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double t = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? t : -t);
    if (t < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require_samples(samples, "KS test");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  return TestResult{d, kolmogorov_q((rn + 0.12 + 0.11 / rn) * d), 0.0};
}

TestResult chi_square_gof(const std::vector<std::uint64_t>& counts,
                          const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.size() < 2) {
    throw DomainError("chi-square: need matching counts and probabilities, at least 2");
  }
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(n > 0.0)) throw DomainError("chi-square: no observations");
  double stat = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (counts[i] != 0) return TestResult{INFINITY, 0.0, 0.0};
      continue;
    }
    const double e = n * probs[i];
    stat += (counts[i] - e) * (counts[i] - e) / e;
    ++used;
  }
  const double dof = used - 1;
  if (dof < 1) throw DomainError("chi-square: fewer than two categories with mass");
  const boost::math::chi_squared_distribution<double> chi(dof);
  return TestResult{stat, boost::math::cdf(boost::math::complement(chi, stat)), dof};
}

TestResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                 const std::vector<std::uint64_t>& b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("chi-square: mismatched categories");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(na > 0.0 && nb > 0.0)) throw DomainError("chi-square: empty sample");
  double stat = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double tot = static_cast<double>(a[i] + b[i]);
    if (tot == 0.0) continue;
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    ++used;
  }
  const double dof = used - 1;
  if (dof < 1) throw DomainError("chi-square: fewer than two occupied categories");
  const boost::math::chi_squared_distribution<double> chi(dof);
  return TestResult{stat, boost::math::cdf(boost::math::complement(chi, stat)), dof};
}

std::vector<double> discrete_law_oracle(const std::vector<double>& q,
                                        const std::vector<double>& w_means) {
  if (q.empty() || q.size() != w_means.size()) throw DomainError("law oracle: size mismatch");
  const double wmax = *std::max_element(w_means.begin(), w_means.end());
  std::vector<double> out(q.size());
  double z = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] >= 0.0)) throw DomainError("law oracle: negative proposal mass");
    out[i] = q[i] * std::exp(w_means[i] - wmax);
    z += out[i];
  }
  if (!(z > 0.0)) throw DomainError("law oracle: proposal has no mass");
  for (double& v : out) v /= z;
  return out;
}

double scaling_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 4) {
    throw DomainError("scaling slope: need at least 4 paired points");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && ys[i] > 0.0)) throw DomainError("scaling slope: values must be positive");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx < 1e-12 * n) throw DomainError("scaling slope: degenerate x range");
  return sxy / sxx;
}

bool enough_passes(const std::vector<bool>& passes, int required) {
  return std::count(passes.begin(), passes.end(), true) >= required;
}

double binomial_se(double p, std::size_t n) {
  if (n == 0) throw DomainError("binomial_se: n must be positive");
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

}  // namespace hiacc
