#include "causalboot/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "causalboot/step_cdf.hpp"

namespace causalboot {

namespace {

double mean_of(const std::vector<double>& v) {
  long double acc = 0.0L;
  for (double x : v) acc += x;
  return static_cast<double>(acc / v.size());
}

// Centered second moment with an explicit denominator (two-pass form).
double central_s2(const std::vector<double>& v, double mean, double denom) {
  long double acc = 0.0L;
  for (double x : v) {
    const double d = x - mean;
    acc += static_cast<long double>(d) * d;
  }
  return static_cast<double>(acc / denom);
}

}  // namespace

double ate_estimate(const ObservedSample& s) {
  long double sum0 = 0.0L, sum1 = 0.0L;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    if (s.w[i]) sum1 += s.y[i]; else sum0 += s.y[i];
  }
  return static_cast<double>(sum1 / s.n1 - sum0 / s.n0);
}

VarianceBreakdown true_randomization_variance(const PotentialPopulation& p,
                                              int n0, int n1) {
  if (n0 < 1 || n1 < 1) throw std::invalid_argument("stratum sizes must be positive");
  const long long N = p.size();
  if (n0 + n1 > N) throw std::invalid_argument("population smaller than sample");

  const double m0 = mean_of(p.y0);
  const double m1 = mean_of(p.y1);
  const double denom = static_cast<double>(N - 1);

  VarianceBreakdown out;
  out.s2_0 = central_s2(p.y0, m0, denom);
  out.s2_1 = central_s2(p.y1, m1, denom);
  long double acc = 0.0L;
  const double tau = m1 - m0;
  for (std::size_t i = 0; i < p.y0.size(); ++i) {
    const double d = (p.y1[i] - p.y0[i]) - tau;
    acc += static_cast<long double>(d) * d;
  }
  out.s2_01 = static_cast<double>(acc / denom);
  out.v = out.s2_0 / n0 + out.s2_1 / n1 - out.s2_01 / static_cast<double>(N);
  if (out.v < 0.0) {  // rounding only; the exact value is a variance
    out.v = 0.0;
    out.clamped = true;
  }
  return out;
}

VarianceBreakdown neyman_variance(const ObservedSample& s) {
  std::vector<double> y0 = s.stratum(0);
  std::vector<double> y1 = s.stratum(1);
  std::sort(y0.begin(), y0.end());
  std::sort(y1.begin(), y1.end());
  const StratumMoments m = stratum_moments_sorted(y0, y1);
  VarianceBreakdown out;
  out.s2_0 = m.s2_0;
  out.s2_1 = m.s2_1;
  out.s2_01 = 0.0;
  out.v = out.s2_0 / s.n0 + out.s2_1 / s.n1;
  return out;
}

StratumMoments stratum_moments_sorted(std::span<const double> y0_sorted,
                                      std::span<const double> y1_sorted) {
  const auto m0 = static_cast<double>(y0_sorted.size());
  const auto m1 = static_cast<double>(y1_sorted.size());

  long double sum0 = 0.0L, sum1 = 0.0L;
  for (double x : y0_sorted) sum0 += x;
  for (double x : y1_sorted) sum1 += x;

  StratumMoments out;
  out.mean0 = static_cast<double>(sum0 / m0);
  out.mean1 = static_cast<double>(sum1 / m1);

  long double acc0 = 0.0L, acc1 = 0.0L;
  for (double x : y0_sorted) {
    const double d = x - out.mean0;
    acc0 += static_cast<long double>(d) * d;
  }
  for (double x : y1_sorted) {
    const double d = x - out.mean1;
    acc1 += static_cast<long double>(d) * d;
  }
  out.s2_0 = static_cast<double>(acc0 / (m0 - 1.0));
  out.s2_1 = static_cast<double>(acc1 / (m1 - 1.0));

  if (y0_sorted.size() == y1_sorted.size()) {
    // s2_0 + s2_1 - 2*cov_iso rewritten as the centered squared difference
    // of the rank-coupled quantiles (the refinement is the diagonal here).
    // Algebraically identical, but a sum of squares: identical strata give
    // an exact zero and rounding can never go negative.
    long double acc = 0.0L;
    for (std::size_t i = 0; i < y0_sorted.size(); ++i) {
      const double d = (y1_sorted[i] - out.mean1) - (y0_sorted[i] - out.mean0);
      acc += static_cast<long double>(d) * d;
    }
    out.s2_01 = static_cast<double>(acc / (m0 - 1.0));
    return out;
  }

  // Largest covariance attainable with the observed marginals, reached by
  // the rank coupling; the df factor keeps it comparable with the nw-1
  // variances (Cauchy-Schwarz then gives cov_iso <= sqrt(s2_0 * s2_1)).
  const double raw = iso_product_moment_sorted(y0_sorted, y1_sorted) -
                     out.mean0 * out.mean1;
  const double df = std::sqrt(m0 / (m0 - 1.0)) * std::sqrt(m1 / (m1 - 1.0));
  const double cov_iso = df * raw;

  out.s2_01 = out.s2_0 + out.s2_1 - 2.0 * cov_iso;
  if (out.s2_01 < 0.0) {  // exact value is >= (sd0 - sd1)^2 >= 0
    out.s2_01 = 0.0;
    out.clamped = true;
  }
  return out;
}

VarianceBreakdown agl_variance(const ObservedSample& s, long long N) {
  if (N < s.n()) throw std::invalid_argument("population smaller than sample");

  std::vector<double> y0 = s.stratum(0);
  std::vector<double> y1 = s.stratum(1);
  std::sort(y0.begin(), y0.end());
  std::sort(y1.begin(), y1.end());
  const StratumMoments m = stratum_moments_sorted(y0, y1);

  VarianceBreakdown out;
  out.s2_0 = m.s2_0;
  out.s2_1 = m.s2_1;
  out.s2_01 = m.s2_01;
  out.clamped = m.clamped;
  out.v = out.s2_0 / s.n0 + out.s2_1 / s.n1 - out.s2_01 / static_cast<double>(N);
  if (out.v < 0.0) {
    out.v = 0.0;
    out.clamped = true;
  }
  return out;
}

double sigma_bound(const ObservedSample& s, double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("sampling fraction must lie in (0,1]");
  }
  long long N = std::llround(s.n() / q);
  if (N < s.n()) N = s.n();
  return std::sqrt(s.n() * agl_variance(s, N).v);
}

double fisher_implicit_variance(const ObservedSample& s) {
  const VarianceBreakdown ney = neyman_variance(s);
  const double n = s.n();
  return ((s.n0 * ney.s2_0 + s.n1 * ney.s2_1) / n) * (1.0 / s.n1 + 1.0 / s.n0);
}

KernelBlocks randomization_cov_kernel(const PotentialPopulation& p, double prop,
                                      double q, std::vector<double> grid0,
                                      std::vector<double> grid1) {
  if (!(prop > 0.0 && prop < 1.0)) {
    throw std::invalid_argument("treatment proportion must lie in (0,1)");
  }
  if (!(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("sampling fraction must lie in (0,1]");
  }

  const auto [f0, f1] = population_marginals(p);
  const std::size_t g0 = grid0.size();
  const std::size_t g1 = grid1.size();
  const double N = static_cast<double>(p.size());

  std::vector<double> F0(g0), F1(g1);
  for (std::size_t i = 0; i < g0; ++i) F0[i] = f0.eval(grid0[i]);
  for (std::size_t j = 0; j < g1; ++j) F1[j] = f1.eval(grid1[j]);

  KernelBlocks out;
  out.grid0 = std::move(grid0);
  out.grid1 = std::move(grid1);
  out.h00.resize(g0 * g0);
  out.h11.resize(g1 * g1);
  out.h01.resize(g0 * g1);

  const double c0 = 1.0 / (1.0 - prop) - q;
  const double c1 = 1.0 / prop - q;
  for (std::size_t i = 0; i < g0; ++i) {
    for (std::size_t j = 0; j < g0; ++j) {
      out.h00[i * g0 + j] = c0 * (std::min(F0[i], F0[j]) - F0[i] * F0[j]);
    }
  }
  for (std::size_t i = 0; i < g1; ++i) {
    for (std::size_t j = 0; j < g1; ++j) {
      out.h11[i * g1 + j] = c1 * (std::min(F1[i], F1[j]) - F1[i] * F1[j]);
    }
  }
  for (std::size_t i = 0; i < g0; ++i) {
    for (std::size_t j = 0; j < g1; ++j) {
      long long joint = 0;
      for (std::size_t k = 0; k < p.y0.size(); ++k) {
        if (p.y0[k] <= out.grid0[i] && p.y1[k] <= out.grid1[j]) ++joint;
      }
      const double F01 = static_cast<double>(joint) / N;
      out.h01[i * g1 + j] = -q * (F01 - F0[i] * F1[j]);
    }
  }
  return out;
}

}  // namespace causalboot
