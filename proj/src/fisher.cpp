#include "causalboot/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "causalboot/estimators.hpp"
#include "causalboot/normal.hpp"

namespace causalboot {

namespace {

constexpr long long kMaxExhaustive = 1'000'000;
constexpr long long kMaxDraws = 1LL << 29;

// The statistic under the constant-effect null is affine in per-assignment
// totals: with S_y the outcome sum over the reference treated set and k
// its overlap with the observed treated set,
//   tau*_hat(tau0) = (S_y + tau0*(n1 - k)) * (1/n0 + 1/n1) - Y_tot / n0.
// Storing (S_y, k) per assignment lets a whole tau0 grid be scanned in
// O(draws) per point.
struct ReferenceSet {
  std::vector<double> sum_y;
  std::vector<int> overlap;
  double y_tot = 0.0;
  double tau_hat = 0.0;
  int n0 = 0, n1 = 0;
};

long long choose_capped(int n, int k, long long cap) {
  long double c = 1.0L;
  for (int i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > static_cast<long double>(cap) * 2) return cap + 1;
  }
  const long long r = std::llround(static_cast<double>(c));
  return r > cap ? cap + 1 : r;
}

ReferenceSet build_reference(const ObservedSample& s, long long mc_draws,
                             SeedSpec seed) {
  ReferenceSet ref;
  ref.n0 = s.n0;
  ref.n1 = s.n1;
  ref.tau_hat = ate_estimate(s);
  long double tot = 0.0L;
  for (double v : s.y) tot += v;
  ref.y_tot = static_cast<double>(tot);

  const int n = s.n();
  if (mc_draws == 0) {
    if (choose_capped(n, s.n1, kMaxExhaustive) > kMaxExhaustive) {
      throw std::invalid_argument("exhaustive enumeration infeasible");
    }
    // lexicographic run over all n1-subsets via mask permutations
    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + s.n1, 1);
    do {
      long double sum = 0.0L;
      int k = 0;
      for (int i = 0; i < n; ++i) {
        if (mask[i]) {
          sum += s.y[i];
          k += s.w[i];
        }
      }
      ref.sum_y.push_back(static_cast<double>(sum));
      ref.overlap.push_back(k);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return ref;
  }

  if (mc_draws < 0 || mc_draws > kMaxDraws) {
    throw std::invalid_argument("replication count too large");
  }
  ref.sum_y.reserve(mc_draws + 1);
  ref.overlap.reserve(mc_draws + 1);

  // entry 0: the observed assignment, so p >= 1/(mc_draws + 1)
  long double obs_sum = 0.0L;
  for (int i = 0; i < n; ++i) {
    if (s.w[i]) obs_sum += s.y[i];
  }
  ref.sum_y.push_back(static_cast<double>(obs_sum));
  ref.overlap.push_back(s.n1);

  std::vector<int> idx(n);
  for (long long m = 0; m < mc_draws; ++m) {
    Rng rng(seed.sub(static_cast<std::uint64_t>(m)));
    std::iota(idx.begin(), idx.end(), 0);
    detail::partial_shuffle(rng, idx, n, s.n1);
    long double sum = 0.0L;
    int k = 0;
    for (int i = 0; i < s.n1; ++i) {
      sum += s.y[idx[i]];
      k += s.w[idx[i]];
    }
    ref.sum_y.push_back(static_cast<double>(sum));
    ref.overlap.push_back(k);
  }
  return ref;
}

double pvalue_at(const ReferenceSet& ref, double tau0) {
  const double rate = 1.0 / ref.n0 + 1.0 / ref.n1;
  const double offset = ref.y_tot / ref.n0;
  const double d_obs = std::fabs(ref.tau_hat - tau0);
  // slack toward counting ties: boundary assignments (the observed one in
  // particular) must not drop out of the tail through rounding
  const double threshold = d_obs - 1e-12 * std::max(1.0, d_obs);
  long long tail = 0;
  for (std::size_t m = 0; m < ref.sum_y.size(); ++m) {
    const double stat =
        (ref.sum_y[m] + tau0 * (ref.n1 - ref.overlap[m])) * rate - offset;
    if (std::fabs(stat - tau0) >= threshold) ++tail;
  }
  return static_cast<double>(tail) / static_cast<double>(ref.sum_y.size());
}

}  // namespace

double fisher_test(const ObservedSample& s, double tau0, long long mc_draws,
                   SeedSpec seed) {
  if (!std::isfinite(tau0)) throw std::invalid_argument("non-finite outcome");
  const ReferenceSet ref = build_reference(s, mc_draws, seed);
  return pvalue_at(ref, tau0);
}

ConfidenceInterval fisher_ci(const ObservedSample& s, double level,
                             double grid_step, long long mc_draws,
                             SeedSpec seed) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level out of range");
  }
  const ReferenceSet ref = build_reference(s, mc_draws, seed);
  const double se = std::sqrt(fisher_implicit_variance(s));
  const double half = 6.0 * se;

  long long steps = 200;  // default grid: 401 points over tau_hat +/- 6 se
  double step = half / steps;
  if (grid_step > 0.0 && se > 0.0) {
    step = grid_step;
    steps = static_cast<long long>(std::ceil(half / step));
  }
  if (se == 0.0) {  // constant strata: the grid collapses to tau_hat
    steps = 0;
    step = 0.0;
  }

  const double alpha = 1.0 - level;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (long long i = -steps; i <= steps; ++i) {
    const double tau0 = ref.tau_hat + static_cast<double>(i) * step;
    if (pvalue_at(ref, tau0) > alpha) {
      if (!any) lo = tau0;
      hi = tau0;
      any = true;
    }
  }

  ConfidenceInterval out;
  out.level = level;
  if (!any) {
    out.lo = out.hi = ref.tau_hat;
    out.degenerate = true;
  } else {
    out.lo = lo;
    out.hi = hi;
  }
  out.implied_se = (out.hi - out.lo) / (2.0 * kZ975);
  return out;
}

}  // namespace causalboot
