#include "causalboot/population.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace causalboot {

PotentialPopulation::PotentialPopulation(std::vector<double> y0_in,
                                         std::vector<double> y1_in,
                                         std::vector<std::uint8_t> origin_w_in)
    : y0(std::move(y0_in)), y1(std::move(y1_in)), origin_w(std::move(origin_w_in)) {
  if (y0.size() != y1.size()) {
    throw std::invalid_argument("potential outcome vectors differ in length");
  }
  if (!origin_w.empty() && origin_w.size() != y0.size()) {
    throw std::invalid_argument("origin vector differs in length");
  }
  if (y0.size() < 4) {
    throw std::invalid_argument("population needs at least four units");
  }
  for (std::size_t i = 0; i < y0.size(); ++i) {
    if (!std::isfinite(y0[i]) || !std::isfinite(y1[i])) {
      throw std::invalid_argument("non-finite outcome");
    }
  }
}

std::vector<double> StratumReplicas::expanded() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(total));
  for (std::size_t j = 0; j < values.size(); ++j) {
    for (long long c = 0; c < copies[j]; ++c) out.push_back(values[j]);
  }
  return out;
}

namespace {

// ceil(a / b) for positive integers
inline long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

StratumReplicas replicate_stratum(std::vector<double> sorted, long long Nw) {
  const auto nw = static_cast<long long>(sorted.size());
  StratumReplicas out;
  out.values = std::move(sorted);
  out.copies.resize(static_cast<std::size_t>(nw));
  out.total = Nw;
  long long prev = 0;
  for (long long j = 1; j <= nw; ++j) {
    const long long cur = ceil_div(j * Nw, nw);
    out.copies[static_cast<std::size_t>(j - 1)] = cur - prev;
    prev = cur;
  }
  return out;
}

}  // namespace

ReplicatedSample replicate_to_population(const ObservedSample& s, long long N) {
  if (N < s.n()) throw std::invalid_argument("population smaller than sample");

  std::vector<double> y0 = s.stratum(0);
  std::vector<double> y1 = s.stratum(1);
  std::sort(y0.begin(), y0.end());
  std::sort(y1.begin(), y1.end());

  const long long N0 = ceil_div(static_cast<long long>(s.n0) * N, s.n());
  const long long N1 = N - N0;

  ReplicatedSample out;
  out.control = replicate_stratum(std::move(y0), N0);
  out.treated = replicate_stratum(std::move(y1), N1);
  return out;
}

PotentialPopulation impute_isotone(const ObservedSample& s, long long N) {
  const ReplicatedSample reps = replicate_to_population(s, N);
  // sorted observed strata; the quantile at u of a sample of size m is its
  // ceil(u * m)-th order statistic, evaluated below in exact integer
  // arithmetic at the replicated ranks u = r / Nw
  const std::vector<double>& v0 = reps.control.values;
  const std::vector<double>& v1 = reps.treated.values;

  std::vector<double> y0, y1;
  std::vector<std::uint8_t> origin;
  y0.reserve(static_cast<std::size_t>(N));
  y1.reserve(static_cast<std::size_t>(N));
  origin.reserve(static_cast<std::size_t>(N));

  long long r = 0;
  for (std::size_t j = 0; j < v0.size(); ++j) {
    for (long long c = 0; c < reps.control.copies[j]; ++c) {
      ++r;
      const auto k = static_cast<std::size_t>(
          ceil_div(r * static_cast<long long>(v1.size()), reps.control.total));
      y0.push_back(v0[j]);
      y1.push_back(v1[k - 1]);
      origin.push_back(0);
    }
  }
  r = 0;
  for (std::size_t j = 0; j < v1.size(); ++j) {
    for (long long c = 0; c < reps.treated.copies[j]; ++c) {
      ++r;
      const auto k = static_cast<std::size_t>(
          ceil_div(r * static_cast<long long>(v0.size()), reps.treated.total));
      y0.push_back(v0[k - 1]);
      y1.push_back(v1[j]);
      origin.push_back(1);
    }
  }
  return PotentialPopulation(std::move(y0), std::move(y1), std::move(origin));
}

std::pair<StepCdf, StepCdf> population_marginals(const PotentialPopulation& p) {
  return {StepCdf::from_sample(p.y0), StepCdf::from_sample(p.y1)};
}

}  // namespace causalboot
