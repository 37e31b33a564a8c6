#include "causalboot/step_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace causalboot {

StepCdf StepCdf::from_sample(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty stratum");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite outcome");
  }
  std::sort(sorted.begin(), sorted.end());

  const double n = static_cast<double>(sorted.size());
  StepCdf out;
  std::size_t i = 0;
  std::size_t seen = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    seen += j - i;
    out.levels_.push_back(sorted[i]);
    out.weights_.push_back(static_cast<double>(j - i) / n);
    out.cum_.push_back(static_cast<double>(seen) / n);  // == 1.0 exactly at the end
    i = j;
  }
  return out;
}

StepCdf StepCdf::from_weighted(std::vector<double> levels,
                               std::vector<double> weights) {
  if (levels.empty()) throw std::invalid_argument("empty stratum");
  if (levels.size() != weights.size()) {
    throw std::invalid_argument("levels and weights must have equal length");
  }
  long double total = 0.0L;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) throw std::invalid_argument("non-finite outcome");
    if (!(weights[i] > 0.0)) throw std::invalid_argument("weights must be positive");
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw std::invalid_argument("levels must be strictly increasing");
    }
    total += weights[i];
  }
  StepCdf out;
  out.levels_ = std::move(levels);
  out.weights_.resize(out.levels_.size());
  out.cum_.resize(out.levels_.size());
  long double running = 0.0L;
  for (std::size_t i = 0; i < out.levels_.size(); ++i) {
    out.weights_[i] = static_cast<double>(weights[i] / total);
    running += weights[i];
    out.cum_[i] = static_cast<double>(running / total);  // last entry: total/total == 1
  }
  return out;
}

double StepCdf::eval(double y) const {
  // index of the last level <= y
  auto it = std::upper_bound(levels_.begin(), levels_.end(), y);
  if (it == levels_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - levels_.begin()) - 1];
}

double StepCdf::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) {
    throw std::invalid_argument("quantile level out of range");
  }
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;  // guards rounding in weighted cum sums
  return levels_[static_cast<std::size_t>(it - cum_.begin())];
}

double StepCdf::mean() const {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < levels_.size(); ++i) acc += weights_[i] * levels_[i];
  return static_cast<double>(acc);
}

double iso_product_moment(const StepCdf& a, const StepCdf& b) {
  const auto& ca = a.cum();
  const auto& cb = b.cum();
  const auto& va = a.levels();
  const auto& vb = b.levels();
  long double acc = 0.0L;
  long double prev = 0.0L;
  std::size_t i = 0, j = 0;
  while (i < ca.size() && j < cb.size()) {
    const double c = std::min(ca[i], cb[j]);
    acc += (static_cast<long double>(c) - prev) * va[i] * vb[j];
    prev = c;
    if (ca[i] <= c) ++i;
    if (cb[j] <= c) ++j;
  }
  return static_cast<double>(acc);
}

double iso_product_moment_sorted(std::span<const double> a_sorted,
                                 std::span<const double> b_sorted) {
  const auto m0 = static_cast<std::int64_t>(a_sorted.size());
  const auto m1 = static_cast<std::int64_t>(b_sorted.size());
  if (m0 == 0 || m1 == 0) throw std::invalid_argument("empty stratum");
  // Work on the grid of integer positions in units of 1/(m0*m1): the
  // breakpoints of a sit at (i+1)*m1, those of b at (j+1)*m0, and
  // comparisons between them are exact.
  long double acc = 0.0L;
  std::int64_t prev = 0;
  std::int64_t i = 0, j = 0;
  while (i < m0 && j < m1) {
    const std::int64_t na = (i + 1) * m1;
    const std::int64_t nb = (j + 1) * m0;
    const std::int64_t c = std::min(na, nb);
    acc += static_cast<long double>(c - prev) * a_sorted[i] * b_sorted[j];
    prev = c;
    if (na == c) ++i;
    if (nb == c) ++j;
  }
  return static_cast<double>(acc / (static_cast<long double>(m0) * m1));
}

}  // namespace causalboot
