#pragma once

#include "cvl/value_dist.hpp"

namespace cvl {

// sup_c |E_D max{c, r} - E_Dp max{c, r}| over [0, c_max]. The gap is
// piecewise linear with breakpoints only at atoms, so evaluating at the
// atoms of both distributions plus the endpoints is exact; the uniform grid
// of step `resolution` is belt and braces.
double capped_gap_sup(const DiscreteValueDistribution& d, const DiscreteValueDistribution& dp,
                      double resolution);

// inf{eps : F(z-eps)-eps <= G(z) <= F(z+eps)+eps for all z}, by bisection to
// absolute tolerance 1e-9. Feasibility is checked exactly at the finite
// critical set of CDF breakpoints shifted by eps.
double levy_distance(const DiscreteValueDistribution& d, const DiscreteValueDistribution& dp);

// Independent brute-force check: eps scanned over multiples of grid_step,
// feasibility tested on a dense z-grid of the same step.
double levy_distance_oracle(const DiscreteValueDistribution& d,
                            const DiscreteValueDistribution& dp, double grid_step);

// One-dimensional Wasserstein-1 distance as the exact area between the two
// step CDFs.
double wasserstein_distance(const DiscreteValueDistribution& d,
                            const DiscreteValueDistribution& dp);

}  // namespace cvl
