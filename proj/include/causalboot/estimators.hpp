#pragma once

#include <span>
#include <vector>

#include "causalboot/observed_sample.hpp"
#include "causalboot/population.hpp"

namespace causalboot {

// Variance of the difference-in-means estimator split into its three
// ingredients,
//   v = s2_0 / n0 + s2_1 / n1 - s2_01 / N,
// where s2_0, s2_1 are per-stratum variances and s2_01 is the variance of
// the unit-level effects (the term standard errors usually cannot identify
// and therefore drop or bound).  `clamped` flags the rare rounding case
// where a tiny negative v or s2_01 was pulled up to zero.
struct VarianceBreakdown {
  double s2_0 = 0.0;
  double s2_1 = 0.0;
  double s2_01 = 0.0;
  double v = 0.0;
  bool clamped = false;
};

// Difference in stratum means, the design-unbiased effect estimate.
double ate_estimate(const ObservedSample& s);

// Exact variance of the difference in means when n0 controls and n1
// treated are drawn from population p by sampling without replacement and
// complete randomization.  All three moments use N-1 denominators.
// Requires n0, n1 >= 1 and n0 + n1 <= N.
VarianceBreakdown true_randomization_variance(const PotentialPopulation& p,
                                              int n0, int n1);

// The conservative standard estimate: stratum sample variances (nw - 1
// denominators) over stratum sizes, effect-variance term treated as zero.
VarianceBreakdown neyman_variance(const ObservedSample& s);

// Sharpened estimate that subtracts the largest effect variance consistent
// with the observed marginals: s2_01 = s2_0 + s2_1 - 2*cov_iso where
// cov_iso is the rank-coupled (comonotone) covariance bound, rescaled by
// sqrt(n0/(n0-1))*sqrt(n1/(n1-1)) to match the nw-1 variance convention.
// Always lands in [0, neyman_variance(s).v].
VarianceBreakdown agl_variance(const ObservedSample& s, long long N);

// The moment computations behind neyman_variance / agl_variance for two
// pre-sorted strata.  Resampling loops call this directly so their
// studentizers agree with the analytic estimators to the last bit without
// materializing an ObservedSample per replication.  s2_01 is clamped at
// zero (its exact value is >= (sd0 - sd1)^2).
struct StratumMoments {
  double mean0 = 0.0, mean1 = 0.0;
  double s2_0 = 0.0, s2_1 = 0.0;
  double s2_01 = 0.0;
  bool clamped = false;
};

StratumMoments stratum_moments_sorted(std::span<const double> y0_sorted,
                                      std::span<const double> y1_sorted);

// sqrt(n * v) with v from agl_variance at population size N = round(n/q);
// the scale used to studentize bootstrap draws.  q in (0, 1].
double sigma_bound(const ObservedSample& s, double q);

// Variance implicitly attached to the difference in means by the
// permutation reference distribution:
//   ((n0*s2_0 + n1*s2_1) / n) * (1/n1 + 1/n0).
double fisher_implicit_variance(const ObservedSample& s);

// Asymptotic covariance kernel of the joint empirical process
// sqrt(n)*(F0_hat - F0, F1_hat - F1) under sampling fraction q = n/N and
// treated share prop = n1/n:
//   H00(y,y') = (1/(1-prop) - q) * (F0(min) - F0 F0')
//   H11(y,y') = (1/prop   - q) * (F1(min) - F1 F1')
//   H01(y,y') = -q * (F01(y,y') - F0(y) F1(y'))
// evaluated on a grid; F01 is the population's joint distribution.
struct KernelBlocks {
  std::vector<double> grid0, grid1;
  std::vector<double> h00, h01, h11;  // row-major

  double at00(std::size_t i, std::size_t j) const { return h00[i * grid0.size() + j]; }
  double at11(std::size_t i, std::size_t j) const { return h11[i * grid1.size() + j]; }
  double at01(std::size_t i, std::size_t j) const { return h01[i * grid1.size() + j]; }
};

KernelBlocks randomization_cov_kernel(const PotentialPopulation& p, double prop,
                                      double q, std::vector<double> grid0,
                                      std::vector<double> grid1);

}  // namespace causalboot
