#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace causalboot {

// Exact step-function distribution on a finite support.  Stores the sorted
// distinct support values, their probability masses, and the cumulative
// masses; nothing is smoothed or interpolated, so evaluation and inversion
// reproduce the discrete distribution bit for bit.
//
// Used both for empirical distributions of outcome strata (every
// observation gets mass 1/n) and for marginals of constructed populations.
class StepCdf {
 public:
  // Empirical distribution of a sample.  Duplicates are merged into a
  // single support point carrying mass (multiplicity / n).  Throws
  // std::invalid_argument("empty stratum") on an empty input and
  // std::invalid_argument("non-finite outcome") if any value is NaN or
  // infinite.
  static StepCdf from_sample(std::span<const double> values);

  // General weighted construction: `levels` strictly increasing and finite,
  // `weights` positive; weights are normalized to sum to one.
  static StepCdf from_weighted(std::vector<double> levels,
                               std::vector<double> weights);

  // F(y) = P(Y <= y).  Right-continuous; returns 0 below the support and 1
  // at and above its maximum.  y may be +/-infinity.
  double eval(double y) const;

  // Left-continuous generalized inverse,
  //   Q(u) = inf { y : F(y) >= u },   0 < u <= 1.
  // Computed by binary search on the cumulative masses, so Q(F(y)) == y
  // exactly at every support point.  Throws
  // std::invalid_argument("quantile level out of range") outside (0, 1].
  double quantile(double u) const;

  const std::vector<double>& levels() const { return levels_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& cum() const { return cum_; }

  double min() const { return levels_.front(); }
  double max() const { return levels_.back(); }
  double mean() const;

 private:
  StepCdf() = default;

  std::vector<double> levels_;   // strictly increasing support
  std::vector<double> weights_;  // positive, sums to 1
  std::vector<double> cum_;      // running sums, cum_.back() == 1 exactly
};

// The rank-coupled product moment
//   integral_0^1 Qa(u) * Qb(u) du,
// i.e. E[A*B] when A and B are coupled through a common uniform rank
// (highest-with-highest).  Evaluated exactly by walking the common
// refinement of the two cumulative grids.
double iso_product_moment(const StepCdf& a, const StepCdf& b);

// Same moment for two sorted equal-weight samples (mass 1/size each).
// Breakpoint comparisons are done in integer arithmetic on the common
// denominator a.size()*b.size(), so the refinement is exact even when the
// two grids nearly coincide.
double iso_product_moment_sorted(std::span<const double> a_sorted,
                                 std::span<const double> b_sorted);

}  // namespace causalboot
