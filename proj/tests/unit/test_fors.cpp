#include <doctest.h>

#include <cmath>
#include <vector>

#include "hiacc/errors.hpp"
#include "hiacc/fors.hpp"
#include "hiacc/verify.hpp"

using namespace hiacc;

namespace {

// Proposal over integer points {0, ..., k-1} encoded as 1D vectors.
ProposalSampler discrete_proposal(std::vector<double> q) {
  return [q = std::move(q)](Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
      acc += q[i];
      if (u < acc) return Vector::Constant(1, static_cast<double>(i));
    }
    return Vector::Constant(1, static_cast<double>(q.size() - 1));
  };
}

EstimatorSource per_point(std::vector<DiscreteDist> laws) {
  return [laws = std::move(laws)](const Vector& x, Rng& rng) {
    return laws[static_cast<std::size_t>(x[0])].sample(rng);
  };
}

std::vector<std::uint64_t> histogram(const ProposalSampler& prop, const EstimatorSource& est,
                                     std::size_t k, int n, double B, std::uint64_t seed) {
  Rng rng(seed);
  QueryLedger ledger;
  ForsConfig cfg;
  cfg.B = B;
  std::vector<std::uint64_t> counts(k, 0);
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(fors_sample(prop, est, cfg, rng, ledger).x[0])];
  return counts;
}

}  // namespace

TEST_SUITE("fors") {
  TEST_CASE("estimator pinned at B accepts on the first attempt") {
    Rng rng(1);
    QueryLedger ledger;
    const ForsConfig cfg;
    for (int i = 0; i < 1000; ++i) {
      const auto r = fors_sample([](Rng& g) { return Vector::Constant(1, g.normal()); },
                                 [](const Vector&, Rng&) { return 1.0; }, cfg, rng, ledger);
      CHECK(r.attempts == 1u);
    }
    CHECK(ledger.fors_attempts == 1000u);
  }

  TEST_CASE("acceptance probability closed forms") {
    CHECK(acceptance_probability({{0.0}, {1.0}}, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(acceptance_probability({{1.0}, {1.0}}, 1.0) == doctest::Approx(1.0));
    CHECK(acceptance_probability({{-1.0, 1.0}, {0.5, 0.5}}, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK_THROWS_AS(acceptance_probability({{2.0}, {1.0}}, 1.0), DomainError);
    CHECK_THROWS_AS(acceptance_probability({{0.0, 1.0}, {0.3, 0.3}}, 1.0), DomainError);
  }

  TEST_CASE("acceptance probability equals the Poisson generating function") {
    // Independent route: sum over j of P(J=j) * E[(B+W)/(2B)]^j.
    const std::vector<DiscreteDist> laws{{{0.0}, {1.0}},
                                         {{-1.0, 1.0}, {0.5, 0.5}},
                                         {{-0.5, 0.25, 0.9}, {0.2, 0.5, 0.3}},
                                         {{-1.0, 0.0}, {0.9, 0.1}}};
    for (const auto& w : laws) {
      const double B = 1.0;
      const double c = (B + w.mean()) / (2 * B);
      double s = 0.0, pj = std::exp(-2 * B);
      for (int j = 0; j < 200; ++j) {
        s += pj * std::pow(c, j);
        pj *= 2 * B / (j + 1);
      }
      CHECK(acceptance_probability(w, B) == doctest::Approx(s).epsilon(1e-12));
    }
  }

  TEST_CASE("per-attempt acceptance matches within three standard errors") {
    const std::vector<DiscreteDist> laws{{{0.0}, {1.0}},
                                         {{-1.0, 1.0}, {0.5, 0.5}},
                                         {{-0.5, 0.25, 0.9}, {0.2, 0.5, 0.3}},
                                         {{-1.0, 0.0}, {0.9, 0.1}}};
    for (const auto& w : laws) {
      Rng rng(7);
      QueryLedger ledger;
      const ForsConfig cfg;
      const int calls = 20000;
      for (int i = 0; i < calls; ++i) {
        fors_sample([](Rng&) { return Vector::Zero(1); },
                    [&w](const Vector&, Rng& r) { return w.sample(r); }, cfg, rng, ledger);
      }
      const double p = acceptance_probability(w, 1.0);
      const double rate = calls / static_cast<double>(ledger.fors_attempts);
      // Geometric count: attempts per call has variance (1-p)/p^2.
      const double se = std::sqrt((1 - p) / (p * p) / calls) * p * p;
      CHECK(std::abs(rate - p) <= 3.0 * se);
    }
  }

  TEST_CASE("output law on a finite space is q times exp of the mean estimator") {
    const std::vector<double> q{0.1, 0.2, 0.3, 0.4};
    const std::vector<DiscreteDist> laws{{{0.0}, {1.0}},
                                         {{-1.0, 1.0}, {0.3, 0.7}},
                                         {{-0.8}, {1.0}},
                                         {{-1.0, 0.5, 1.0}, {0.25, 0.5, 0.25}}};
    const auto counts = histogram(discrete_proposal(q), per_point(laws), 4, 100000, 1.0, 11);
    std::vector<double> means;
    for (const auto& l : laws) means.push_back(l.mean());
    // Independent normalization of q * exp(E W).
    std::vector<double> target(4);
    double z = 0.0;
    for (int i = 0; i < 4; ++i) z += target[i] = q[i] * std::exp(means[i]);
    for (auto& t : target) t /= z;
    CHECK(chi_square_gof(counts, target).p_value > 0.001);
  }

  TEST_CASE("mean-preserving changes of the estimator law leave the output unchanged") {
    const std::vector<double> q{0.25, 0.25, 0.5};
    const std::vector<DiscreteDist> a{{{0.2}, {1.0}}, {{-0.5}, {1.0}}, {{0.0}, {1.0}}};
    const std::vector<DiscreteDist> b{{{-0.6, 1.0}, {0.5, 0.5}},
                                      {{-1.0, 0.0}, {0.5, 0.5}},
                                      {{-1.0, 1.0}, {0.5, 0.5}}};
    const auto ca = histogram(discrete_proposal(q), per_point(a), 3, 100000, 1.0, 3);
    const auto cb = histogram(discrete_proposal(q), per_point(b), 3, 100000, 1.0, 4);
    CHECK(chi_square_two_sample(ca, cb).p_value > 0.001);
  }

  TEST_CASE("estimator draws outside [-B, B] are rejected loudly") {
    Rng rng(1);
    QueryLedger ledger;
    ForsConfig cfg;
    cfg.B = 5.0;  // J ~ Poisson(10) so at least one draw is near certain
    CHECK_THROWS_AS(fors_sample([](Rng&) { return Vector::Zero(1); },
                                [](const Vector&, Rng&) { return 7.0; }, cfg, rng, ledger),
                    DomainError);
  }

  TEST_CASE("budget caps surface with the partial ledger") {
    Rng rng(2);
    QueryLedger ledger;
    ForsConfig cfg;
    cfg.max_attempts = 5;
    cfg.B = 5.0;  // W = -B zeroes the product as soon as J >= 1; P(J = 0) = e^-10
    bool thrown = false;
    try {
      fors_sample([](Rng&) { return Vector::Zero(1); }, [](const Vector&, Rng&) { return -5.0; },
                  cfg, rng, ledger);
    } catch (const BudgetExhausted& e) {
      thrown = true;
      CHECK(e.partial().fors_attempts == 5u);
    }
    CHECK(thrown);
    ForsConfig tight;
    tight.max_w_per_call = 3;
    tight.B = 5.0;
    CHECK_THROWS_AS(fors_sample([](Rng&) { return Vector::Zero(1); },
                                [](const Vector&, Rng&) { return 0.9; }, tight, rng, ledger),
                    BudgetExhausted);
    ForsConfig bad;
    bad.B = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }

  TEST_CASE("estimator draw counts stay under the tail bound") {
    CHECK(fors_wdraw_bound(1.0, 0.01) == doctest::Approx(3 * std::exp(2.0) * std::log(200.0)));
    CHECK(fors_wdraw_bound(1.0, 0.01) == doctest::Approx(117.45).epsilon(1e-3));
    Rng rng(5);
    QueryLedger ledger;
    const ForsConfig cfg;
    std::vector<std::uint64_t> zero_counts, pinned_counts;
    for (int i = 0; i < 10000; ++i) {
      zero_counts.push_back(fors_sample([](Rng&) { return Vector::Zero(1); },
                                        [](const Vector&, Rng&) { return 0.0; }, cfg, rng, ledger)
                                .w_draws);
      pinned_counts.push_back(fors_sample([](Rng&) { return Vector::Zero(1); },
                                          [](const Vector&, Rng&) { return 1.0; }, cfg, rng,
                                          ledger)
                                  .w_draws);
    }
    CHECK(wdraw_tail_check(1.0, 0.01, zero_counts).pass);
    const auto pinned = wdraw_tail_check(1.0, 0.01, pinned_counts);
    // 99th percentile of Poisson(2) is 6.
    CHECK(pinned.quantile >= 5);
    CHECK(pinned.quantile <= 7);
    CHECK(pinned.aggregate_constant > 0.0);
  }

  TEST_CASE("quantile helper picks the order statistic") {
    std::vector<std::uint64_t> c(100);
    for (int i = 0; i < 100; ++i) c[i] = static_cast<std::uint64_t>(i);
    CHECK(wdraw_tail_check(1.0, 0.01, c).quantile == 98.0);
    CHECK(wdraw_tail_check(1.0, 0.1, c).quantile == 89.0);
    CHECK_THROWS_AS(wdraw_tail_check(1.0, 0.1, {}), DomainError);
  }
}
