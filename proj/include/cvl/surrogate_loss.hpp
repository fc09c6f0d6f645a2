#pragma once

#include <span>
#include <vector>

#include "cvl/contextual_model.hpp"

namespace cvl {

// The discretized cap set {0, eps, 2*eps, ...} strictly below c_max.
struct CapGrid {
  double epsilon = 0.0;
  double c_max = 0.0;
  std::vector<double> values;
};

CapGrid cap_grid(double c_max, double epsilon);

// Capped squared loss of V on one sample:
//   sum_c (E_{v~V} max{c, f(v,x)} - max{c, y})^2.
double sample_loss(const WeightDistribution& v, const LabeledSample& s,
                   const RewardFunction& f, const CapGrid& grid);

// Mean of sample_loss over S, accumulated in the given order.
double empirical_loss(const WeightDistribution& v, std::span<const LabeledSample> samples,
                      const RewardFunction& f, const CapGrid& grid);

// Expected capped squared loss of vp under vstar at a fixed context, in
// closed form over vstar's atoms.
double true_loss_at_context(const WeightDistribution& vp, const WeightDistribution& vstar,
                            const RewardFunction& f, std::span<const double> x,
                            const CapGrid& grid);

// Per-cap squared capped-expectation gaps between vp and vstar; the entries
// sum to true_loss_at_context(vp, ...) - true_loss_at_context(vstar, ...).
std::vector<double> loss_gap_decomposition(const WeightDistribution& vp,
                                           const WeightDistribution& vstar,
                                           const RewardFunction& f, std::span<const double> x,
                                           const CapGrid& grid);

// Subgradient of empirical_loss with respect to the k*d atom coordinates of a
// uniform-weight distribution. At a kink (f(v_i,x) equal to a cap) the
// cap-active branch is included.
std::vector<std::vector<double>> loss_subgradient(const WeightDistribution& v,
                                                  std::span<const LabeledSample> samples,
                                                  const RewardFunction& f,
                                                  const CapGrid& grid);

}  // namespace cvl
