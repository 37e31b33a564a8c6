#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "causalboot/observed_sample.hpp"
#include "causalboot/step_cdf.hpp"

namespace causalboot {

// A fully specified finite population: both potential outcomes for every
// unit.  origin_w records which stratum a unit's observed outcome came
// from when the population was built from an experiment (empty for
// synthetic populations).
struct PotentialPopulation {
  PotentialPopulation(std::vector<double> y0_in, std::vector<double> y1_in,
                      std::vector<std::uint8_t> origin_w_in = {});

  long long size() const { return static_cast<long long>(y0.size()); }

  std::vector<double> y0;
  std::vector<double> y1;
  std::vector<std::uint8_t> origin_w;
};

// One stratum's observations blown up to population scale: values holds
// the sorted sample and copies[j] how many population units replicate
// values[j].  Copies follow the quantile-matching rule
//   M_j = ceil(j * Nw / nw) - ceil((j-1) * Nw / nw),
// which guarantees sum(copies) == Nw and every count >= 1 when Nw >= nw.
struct StratumReplicas {
  std::vector<double> values;
  std::vector<long long> copies;
  long long total = 0;

  std::vector<double> expanded() const;
};

struct ReplicatedSample {
  StratumReplicas control;
  StratumReplicas treated;
};

// Splits a target population size N between the strata proportionally
// (N0 = ceil(n0 * N / n), N1 = N - N0) and replicates each stratum.
// Requires N >= n; throws std::invalid_argument("population smaller than
// sample") otherwise.
ReplicatedSample replicate_to_population(const ObservedSample& s, long long N);

// Builds the rank-coupled population behind the causal resampling scheme:
// the r-th smallest of the Nw replicated outcomes in one stratum gets the
// missing counterfactual Q(r / Nw), where Q is the other stratum's quantile
// function.  On tie-free data this is exactly Q1(F0(y)) / Q0(F1(y)); the
// rank form also stays a mean-preserving bijection when a stratum has
// ties (e.g. a constant arm), where the plain plug-in would send every
// tied unit to the other stratum's maximum.  The coupling is comonotone,
// which is the variance-maximizing arrangement of the two marginals.
PotentialPopulation impute_isotone(const ObservedSample& s, long long N);

// Marginal step distributions (F0, F1) of a population, each unit carrying
// mass 1/N.
std::pair<StepCdf, StepCdf> population_marginals(const PotentialPopulation& p);

}  // namespace causalboot
