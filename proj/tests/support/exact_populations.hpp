#pragma once

#include <cmath>
#include <vector>

#include "causalboot/population.hpp"

// Hand-constructable populations whose moment targets are known in closed
// form: +/-c alternating values have mean zero exactly and an N-1
// denominator variance of N*c^2/(N-1), so c = sqrt(s2 * (N-1) / N) hits a
// requested variance.
namespace testsupport {

inline std::vector<double> pm_values(long long N, double s2) {
  const double c =
      std::sqrt(s2 * static_cast<double>(N - 1) / static_cast<double>(N));
  std::vector<double> out(static_cast<std::size_t>(N));
  for (long long i = 0; i < N; ++i) out[i] = i % 2 == 0 ? c : -c;
  return out;
}

// The four benchmark configurations with their analytic standard errors
// for the difference in means (population observed in full, half treated).
struct BenchmarkTarget {
  causalboot::PotentialPopulation population;
  int n0, n1;
  double target_se;
};

inline std::vector<BenchmarkTarget> benchmark_targets() {
  std::vector<BenchmarkTarget> out;
  {
    std::vector<double> y0 = pm_values(200, 1.0);
    out.push_back({causalboot::PotentialPopulation(y0, y0), 100, 100,
                   std::sqrt(0.02)});  // 0.141421...
  }
  {
    std::vector<double> y0 = pm_values(200, 1.0);
    std::vector<double> y1(200, 0.0);
    out.push_back({causalboot::PotentialPopulation(y0, y1), 100, 100,
                   std::sqrt(0.005)});  // 0.0707106...
  }
  {
    std::vector<double> y0 = pm_values(40, 1.0);
    std::vector<double> y1(40, 0.0);
    out.push_back({causalboot::PotentialPopulation(y0, y1), 20, 20,
                   std::sqrt(0.025)});  // 0.158113...
  }
  {
    std::vector<double> y0 = pm_values(40, 2.5);
    std::vector<double> y1(40, 0.0);
    out.push_back({causalboot::PotentialPopulation(y0, y1), 20, 20,
                   0.25});
  }
  return out;
}

}  // namespace testsupport
