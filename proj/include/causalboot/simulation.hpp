#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causalboot/bootstrap.hpp"
#include "causalboot/population.hpp"
#include "causalboot/rng.hpp"

namespace causalboot {

// The benchmark data-generating processes.  Designs 1-4 are the classical
// gaussian benchmarks (1: perfectly correlated equal outcomes, 2: constant
// treated outcome, 3: design 2 at small n, 4: design 3 with a fat-tailed
// control arm).  kGaussianCoupling draws (y0, y1) gaussian with variances
// (0.5, 2) and correlation rho in {-1, 0, 1}; kScaleMixture sets y0 = 0
// and gives y1 a gaussian scale mixture (sd 4 with probability 0.1).
// Every experiment observes the whole population: n = N = n0 + n1.
enum class DesignKind {
  kDesign1,
  kDesign2,
  kDesign3,
  kDesign4,
  kGaussianCoupling,
  kScaleMixture,
};

struct DesignSpec {
  DesignKind kind = DesignKind::kDesign1;
  int n0 = 100;
  int n1 = 100;
  double rho = 0.0;  // gaussian coupling only

  // Parses "1".."4", "coupling:RHO:N0:N1" (rho in {-1,0,1}) or
  // "mixture:N0:N1"; throws std::invalid_argument on anything else.
  static DesignSpec from_token(const std::string& token);
  std::string token() const;

  long long population_size() const { return n0 + n1; }
};

// One population draw: unit-level potential outcome pairs, i.i.d. from the
// design's law.
PotentialPopulation draw_population(const DesignSpec& d, SeedSpec seed);

// A confidence-interval recipe with a reporting name.  Canonical tokens:
//   neyman-gauss, agl-gauss, sboot-gauss, cboot-gauss,
//   sboot-pivotal-neyman, sboot-pivotal-agl,
//   cboot-pivotal-neyman, cboot-pivotal-agl, fisher
struct InferenceMethod {
  std::string name;
  MethodSpec spec;
  bool fisher = false;

  static InferenceMethod from_token(const std::string& token, int B,
                                    AssignmentMode assignment);
};

std::vector<std::string> default_method_tokens();

struct MethodCoverage {
  std::string name;
  double coverage = 0.0;             // share of valid replications covering
  double median_implied_se = 0.0;    // median over valid replications
  int skipped_reps = 0;              // replications where the method failed
  double mean_skipped_draws = 0.0;   // bootstrap draws skipped, per replication
};

struct CoverageReport {
  DesignSpec design;
  int reps = 0;
  int B = 0;
  double level = 0.0;
  std::uint64_t seed = 0;
  AssignmentMode assignment = AssignmentMode::kComplete;
  std::vector<MethodCoverage> rows;

  std::string to_csv() const;
  std::string to_json() const;
};

// Repeats the whole experiment `reps` times: draw a population, randomize,
// run every method, and score each interval against that population's own
// mean effect.  Replication r consumes only substreams r * 2^32 + k of
// `seed`, so the report is identical under any thread count.
CoverageReport run_coverage(const DesignSpec& d,
                            const std::vector<InferenceMethod>& methods,
                            int reps, int B, double level, SeedSpec seed,
                            int threads);

// Simulated vs analytic covariance kernel of the centered empirical
// process, for validating the asymptotic formulas: runs `reps` draws of
// (sample, assignment) from population p, estimates all covariance blocks
// on the grids, and reports the largest absolute deviation from
// randomization_cov_kernel, raw and in standard-error units.  Each entry's
// standard error comes from the per-replication spread of its influence
// values (the centered cross products), so the standardized deviations are
// close to N(0,1) rather than carrying the fat tails of a small-batch
// estimate.  mean_dev_se_units is the average standardized deviation over
// all grid entries — a calibration diagnostic that should sit near 0.8
// when the kernel is correct.
struct KernelCheckResult {
  double max_abs_dev = 0.0;
  double max_dev_se_units = 0.0;
  double mean_dev_se_units = 0.0;
};

KernelCheckResult kernel_check(const PotentialPopulation& p, int n0, int n1,
                               const std::vector<double>& grid0,
                               const std::vector<double>& grid1, int reps,
                               SeedSpec seed);

}  // namespace causalboot
