#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

// Brute-force oracles for the randomization machinery: everything here
// enumerates explicitly and exactly, so tests can pin the fast
// implementations against first-principles computations.
namespace testsupport {

// Visits every 0/1 assignment vector of length n with exactly k ones,
// C(n, k) in total.
template <typename Fn>
void for_each_assignment(int n, int k, Fn&& fn) {
  std::vector<std::uint8_t> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + k, 1);
  do {
    fn(const_cast<const std::vector<std::uint8_t>&>(mask));
  } while (std::prev_permutation(mask.begin(), mask.end()));
}

// Visits every distinct reordering of `values` (couplings of a fixed first
// margin against these values).
template <typename Fn>
void for_each_coupling(std::vector<double> values, Fn&& fn) {
  std::sort(values.begin(), values.end());
  do {
    fn(const_cast<const std::vector<double>&>(values));
  } while (std::next_permutation(values.begin(), values.end()));
}

struct EnumeratedMoments {
  double mean = 0.0;
  double variance = 0.0;  // exact distribution: denominator = count
  long long count = 0;
};

// Exact mean and variance of the difference in means over all complete
// randomizations of a fully observed population (n == N).
template <typename Y0, typename Y1>
EnumeratedMoments enumerate_tau_moments(const Y0& y0, const Y1& y1, int n1) {
  const int n = static_cast<int>(y0.size());
  const int n0 = n - n1;
  long double sum = 0.0L, sumsq = 0.0L;
  long long count = 0;
  for_each_assignment(n, n1, [&](const std::vector<std::uint8_t>& mask) {
    long double s0 = 0.0L, s1 = 0.0L;
    for (int i = 0; i < n; ++i) {
      if (mask[i]) s1 += y1[i]; else s0 += y0[i];
    }
    const long double tau = s1 / n1 - s0 / n0;
    sum += tau;
    sumsq += tau * tau;
    ++count;
  });
  EnumeratedMoments out;
  out.count = count;
  out.mean = static_cast<double>(sum / count);
  out.variance = static_cast<double>(sumsq / count -
                                     (sum / count) * (sum / count));
  return out;
}

// Population mean of v(y1 - y0) over unit-level effects, for convex-order
// comparisons between couplings.
template <typename Fn>
double mean_effect_transform(const std::vector<double>& y0,
                             const std::vector<double>& y1, Fn&& v) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < y0.size(); ++i) acc += v(y1[i] - y0[i]);
  return static_cast<double>(acc / y0.size());
}

// Multiset equality of the unit-level (y0, y1) pairs of two couplings.
inline bool same_joint_law(std::vector<std::pair<double, double>> a,
                           std::vector<std::pair<double, double>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace testsupport
