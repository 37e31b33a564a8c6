#pragma once

#include "causalboot/bootstrap.hpp"
#include "causalboot/observed_sample.hpp"
#include "causalboot/rng.hpp"

namespace causalboot {

// Randomization p-value for the sharp null that every unit's treatment
// effect equals tau0.  Under that null both potential outcomes of every
// unit are known, so the difference in means can be recomputed for
// reference assignments and the two-sided tail
//   P( |tau*_hat - tau0| >= |tau_hat - tau0| )
// evaluated exactly over all C(n, n1) assignments (mc_draws == 0, allowed
// while C(n, n1) <= 1e6) or over mc_draws random assignments plus the
// observed one.  Exhaustive p-values are exact multiples of 1/C(n, n1);
// Monte Carlo ones of 1/(mc_draws + 1).
double fisher_test(const ObservedSample& s, double tau0, long long mc_draws,
                   SeedSpec seed);

// Confidence interval by test inversion: scans a symmetric grid of tau0
// values around tau_hat spanning +/- 6 implied standard errors and keeps
// those with p-value > 1 - level.  grid_step <= 0 selects the default
// 401-point grid.  Every grid point reuses one shared reference assignment
// set, so the scan reproduces fisher_test called point by point with the
// same seed.  An empty non-rejection set yields the degenerate interval
// [tau_hat, tau_hat] with `degenerate` set.
ConfidenceInterval fisher_ci(const ObservedSample& s, double level,
                             double grid_step, long long mc_draws,
                             SeedSpec seed);

}  // namespace causalboot
