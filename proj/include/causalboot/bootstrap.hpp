#pragma once

#include <cstdint>
#include <vector>

#include "causalboot/observed_sample.hpp"
#include "causalboot/rng.hpp"

namespace causalboot {

enum class VarianceEstimator { kNeyman, kAgl };
enum class BootstrapFlavor { kNone, kStandard, kCausal };
enum class AssignmentMode { kComplete, kBernoulli };

// How one confidence-interval row is produced: which resampling scheme (if
// any), which variance estimator studentizes the draws, and whether the
// interval inverts the pivot or just reads a gaussian quantile off a
// bootstrap variance.
struct MethodSpec {
  VarianceEstimator variance = VarianceEstimator::kNeyman;
  BootstrapFlavor flavor = BootstrapFlavor::kNone;
  bool pivotal = false;
  AssignmentMode assignment = AssignmentMode::kComplete;
  int replications = 999;  // B
};

// Studentized draws from one bootstrap run:
//   t_b = sqrt(n) * (tau*_b - tau_hat) / sigma*_b.
// Replications with a degenerate stratum or sigma*_b == 0 are dropped and
// counted in `skipped`, so t and tau_star both have B - skipped entries.
struct TDrawSet {
  std::vector<double> t;
  std::vector<double> tau_star;
  int skipped = 0;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;
  double implied_se = 0.0;  // (hi - lo) / (2 * z_{0.975})
  bool degenerate = false;
};

// Raw engine output shared by several method rows: per retained
// replication the point estimate and both studentizing scales
// sigma* = sqrt(n * v*).
struct BootstrapDraws {
  std::vector<double> tau_star;
  std::vector<double> sigma_neyman;
  std::vector<double> sigma_agl;
  int attempted = 0;
  int skipped_strata = 0;  // replications lost to a stratum of size < 2
};

// One pass of the causal resampling loop over the rank-imputed population
// of size N >= n: per replication, draw n units without replacement
// (identity when n == N), assign treatment, re-estimate.  Replication b
// consumes stream seed.stream_id + b only, so draws are reproducible under
// any parallel schedule.  The AGL scale uses the same N.
BootstrapDraws run_causal_bootstrap(const ObservedSample& s, long long N,
                                    AssignmentMode mode, int B, SeedSpec seed);

// Classical nonparametric bootstrap: per replication, resample n (y, w)
// pairs with replacement.  The AGL scale is evaluated at population size n.
BootstrapDraws run_standard_bootstrap(const ObservedSample& s, int B,
                                      SeedSpec seed);

// Studentizes an engine pass with the chosen variance estimator, dropping
// sigma* == 0 replications.  Throws
// std::runtime_error("degenerate bootstrap population") when more than
// half of all replications were skipped.
TDrawSet studentize_draws(const BootstrapDraws& draws, double tau_hat, int n,
                          VarianceEstimator variance);

// Convenience wrappers: engine pass plus studentization per `spec`.
TDrawSet causal_bootstrap(const ObservedSample& s, long long N,
                          const MethodSpec& spec, SeedSpec seed);
TDrawSet standard_bootstrap(const ObservedSample& s, const MethodSpec& spec,
                            SeedSpec seed);

// Sample variance (B-1 denominator) of the retained point estimates; needs
// at least two draws.
double variance_from_draws(const TDrawSet& draws);

// Studentized bootstrap interval: with c(u) the u-quantile of the recorded
// t draws,
//   [ tau_hat + sigma_hat * c(a/2)     / sqrt(n),
//     tau_hat + sigma_hat * c(1 - a/2) / sqrt(n) ],   a = 1 - level.
// The empirical quantile is order statistic ceil(u * m) (1-based).  The
// draws keep their own orientation (no tail mirroring); see the note at
// the implementation for why.
ConfidenceInterval confidence_interval(double tau_hat, double sigma_hat, int n,
                                       const TDrawSet& draws, double level);

// Same interval shape with gaussian quantiles in place of the t draws.
ConfidenceInterval gaussian_confidence_interval(double tau_hat, double sigma_hat,
                                                int n, double level);

}  // namespace causalboot
