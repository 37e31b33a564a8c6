#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "causalboot/estimators.hpp"
#include "causalboot/fisher.hpp"
#include "causalboot/observed_sample.hpp"
#include "causalboot/rng.hpp"
#include "support/enumeration.hpp"

using namespace causalboot;
using namespace testsupport;

namespace {

// controls {0, 1}, treated {2, 3}; effect estimate 2
ObservedSample split_sample() {
  return ObservedSample({0.0, 1.0, 2.0, 3.0}, {0, 0, 1, 1});
}

ObservedSample gaussian_shift_sample(SeedSpec seed, int per_arm,
                                     double shift) {
  Rng rng(seed);
  std::vector<double> y;
  std::vector<std::uint8_t> w;
  for (int i = 0; i < per_arm; ++i) { y.push_back(rng.normal()); w.push_back(0); }
  for (int i = 0; i < per_arm; ++i) {
    y.push_back(shift + rng.normal());
    w.push_back(1);
  }
  return ObservedSample(std::move(y), std::move(w));
}

}  // namespace

TEST_CASE("exact p-values on a pinned sample", "[fisher]") {
  ObservedSample s = split_sample();

  // zero-effect null: reference effects over the 6 assignments are
  // {-2,-1,0,0,1,2}, the observed |2| is matched only by +/-2
  REQUIRE(fisher_test(s, 0.0, 0, SeedSpec{}) ==
          Catch::Approx(2.0 / 6.0).margin(1e-15));

  // at the point estimate the observed statistic is 0, every assignment
  // ties or beats it
  REQUIRE(fisher_test(s, 2.0, 0, SeedSpec{}) == 1.0);

  // a null far outside the data range leaves only the observed assignment
  // and its mirror image in the tail
  REQUIRE(fisher_test(s, 1000.0, 0, SeedSpec{}) ==
          Catch::Approx(2.0 / 6.0).margin(1e-15));
}

TEST_CASE("exhaustive p-values are multiples of one over the assignment "
          "count",
          "[fisher]") {
  ObservedSample s({0.3, 1.9, -0.7, 2.2, 0.1, 1.4}, {0, 1, 0, 1, 0, 1});
  const double total = 20.0;  // C(6,3)
  for (double tau0 : {-2.0, -0.5, 0.0, 0.3, 0.9, 1.7, 4.0}) {
    const double p = fisher_test(s, tau0, 0, SeedSpec{});
    REQUIRE(p > 0.0);
    REQUIRE(p <= 1.0);
    const double scaled = p * total;
    REQUIRE(scaled == Catch::Approx(std::round(scaled)).margin(1e-9));
  }
}

TEST_CASE("p-value ignores the ordering of units", "[fisher]") {
  ObservedSample s({0.3, 1.9, -0.7, 2.2, 0.1, 1.4}, {0, 1, 0, 1, 0, 1});
  ObservedSample reordered({1.4, -0.7, 2.2, 0.3, 0.1, 1.9},
                           {1, 0, 1, 0, 0, 1});
  for (double tau0 : {0.0, 0.8, -1.2}) {
    REQUIRE(fisher_test(s, tau0, 0, SeedSpec{}) ==
            fisher_test(reordered, tau0, 0, SeedSpec{}));
  }
}

TEST_CASE("under a true sharp null the p-value is exact at every "
          "achievable level",
          "[fisher]") {
  // Build both potential outcomes under effect tau0, enumerate every
  // assignment as "the observed one", and check P(p <= q) == q exactly for
  // each achieved p-value q.  This is the defining validity property of
  // the randomization test and it holds with no asymptotics.
  const std::vector<double> y0 = {0.1, 0.9, 2.3, 4.1, 7.7, 13.0};
  const double tau0 = 0.7;
  const int n = 6, n1 = 2;

  std::vector<double> pvals;
  for_each_assignment(n, n1, [&](const std::vector<std::uint8_t>& w) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = w[i] ? y0[i] + tau0 : y0[i];
    ObservedSample s(y, w);
    pvals.push_back(fisher_test(s, tau0, 0, SeedSpec{}));
  });

  std::vector<double> levels = pvals;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (double q : levels) {
    const double frac =
        static_cast<double>(std::count_if(pvals.begin(), pvals.end(),
                                          [&](double p) { return p <= q; })) /
        pvals.size();
    REQUIRE(frac == Catch::Approx(q).margin(1e-12));
  }
}

TEST_CASE("random reference sets", "[fisher]") {
  ObservedSample s = gaussian_shift_sample(SeedSpec{404, 0}, 5, 0.8);

  SECTION("granularity and reproducibility") {
    const double p = fisher_test(s, 0.0, 999, SeedSpec{12, 0});
    REQUIRE(p >= 1.0 / 1000.0);  // the observed assignment is entry zero
    const double scaled = p * 1000.0;
    REQUIRE(scaled == Catch::Approx(std::round(scaled)).margin(1e-9));
    REQUIRE(fisher_test(s, 0.0, 999, SeedSpec{12, 0}) == p);
    REQUIRE(fisher_test(s, 0.0, 999, SeedSpec{13, 0}) != p);
  }

  SECTION("agreement with exhaustive enumeration") {
    const double exact = fisher_test(s, 0.0, 0, SeedSpec{});  // C(10,5)=252
    const double mc = fisher_test(s, 0.0, 1999, SeedSpec{12, 1});
    const double band =
        4.0 * std::sqrt(exact * (1.0 - exact) / 2000.0) + 1.0 / 2000.0;
    REQUIRE(mc == Catch::Approx(exact).margin(band));
  }

  SECTION("validation") {
    REQUIRE_THROWS_WITH(fisher_test(s, 0.0, -5, SeedSpec{}),
                        Catch::Matchers::ContainsSubstring("replication count"));
    ObservedSample wide = gaussian_shift_sample(SeedSpec{404, 1}, 20, 0.0);
    REQUIRE_THROWS_WITH(fisher_test(wide, 0.0, 0, SeedSpec{}),
                        Catch::Matchers::ContainsSubstring("infeasible"));
  }
}

TEST_CASE("test inversion produces a sensible interval", "[fisher]") {
  ObservedSample s = gaussian_shift_sample(SeedSpec{21, 0}, 15, 1.0);
  const double tau = ate_estimate(s);
  const SeedSpec seed{90, 0};

  ConfidenceInterval ci = fisher_ci(s, 0.95, 0.0, 1999, seed);
  REQUIRE_FALSE(ci.degenerate);
  REQUIRE(ci.lo < tau);
  REQUIRE(ci.hi > tau);

  // the permutation interval should sit in the same ballpark as the
  // normal-theory one
  const double se = std::sqrt(fisher_implicit_variance(s));
  REQUIRE(ci.hi - ci.lo > 2.0 * 1.2 * se);
  REQUIRE(ci.hi - ci.lo < 2.0 * 3.5 * se);

  SECTION("reruns are identical") {
    ConfidenceInterval again = fisher_ci(s, 0.95, 0.0, 1999, seed);
    REQUIRE(again.lo == ci.lo);
    REQUIRE(again.hi == ci.hi);
  }

  SECTION("shifting the treated arm shifts the interval") {
    std::vector<double> y = s.y;
    for (int i = 0; i < s.n(); ++i)
      if (s.w[i]) y[i] += 3.25;
    ObservedSample shifted(y, s.w);
    ConfidenceInterval moved = fisher_ci(shifted, 0.95, 0.0, 1999, seed);
    REQUIRE(moved.lo == Catch::Approx(ci.lo + 3.25).margin(1e-9));
    REQUIRE(moved.hi == Catch::Approx(ci.hi + 3.25).margin(1e-9));
  }

  SECTION("grid refinement moves endpoints by at most one coarse step") {
    ConfidenceInterval coarse = fisher_ci(s, 0.95, 0.02, 1999, seed);
    ConfidenceInterval fine = fisher_ci(s, 0.95, 0.005, 1999, seed);
    REQUIRE(std::fabs(fine.lo - coarse.lo) <= 0.02 + 1e-9);
    REQUIRE(std::fabs(fine.hi - coarse.hi) <= 0.02 + 1e-9);
    REQUIRE(fine.lo <= tau);
    REQUIRE(fine.hi >= tau);
  }

  SECTION("wider level widens the interval") {
    ConfidenceInterval wide = fisher_ci(s, 0.99, 0.0, 1999, seed);
    REQUIRE(wide.lo <= ci.lo);
    REQUIRE(wide.hi >= ci.hi);
  }

  SECTION("validation") {
    REQUIRE_THROWS_WITH(fisher_ci(s, 1.0, 0.0, 999, seed),
                        Catch::Matchers::ContainsSubstring("confidence level"));
    REQUIRE_THROWS_WITH(fisher_ci(s, 0.0, 0.0, 999, seed),
                        Catch::Matchers::ContainsSubstring("confidence level"));
    ObservedSample wide = gaussian_shift_sample(SeedSpec{21, 2}, 20, 0.0);
    REQUIRE_THROWS_WITH(fisher_ci(wide, 0.95, 0.0, 0, seed),
                        Catch::Matchers::ContainsSubstring("infeasible"));
  }
}

TEST_CASE("interval inversion agrees between exhaustive and sampled "
          "reference sets",
          "[fisher]") {
  ObservedSample s = gaussian_shift_sample(SeedSpec{33, 0}, 6, 0.5);
  const SeedSpec seed{91, 0};
  ConfidenceInterval exact = fisher_ci(s, 0.90, 0.05, 0, seed);
  ConfidenceInterval mc = fisher_ci(s, 0.90, 0.05, 3999, seed);
  REQUIRE(mc.lo == Catch::Approx(exact.lo).margin(4 * 0.05 + 1e-9));
  REQUIRE(mc.hi == Catch::Approx(exact.hi).margin(4 * 0.05 + 1e-9));
}
