#pragma once

#include <cstddef>
#include <vector>

#include "cvl/rng.hpp"

namespace cvl {

// Discrete real-valued distribution with strictly increasing atoms in
// [0, c_max] and positive weights summing to one. Duplicate atoms (within
// 1e-12) are merged at construction. Immutable after construction.
class DiscreteValueDistribution {
 public:
  DiscreteValueDistribution(std::vector<double> atoms, std::vector<double> weights,
                            double c_max);

  static DiscreteValueDistribution point_mass(double atom, double c_max);

  // Rescales weights to sum to one before validating. Sets *warned when the
  // input total was off by more than 1e-9.
  static DiscreteValueDistribution normalized(std::vector<double> atoms,
                                              std::vector<double> weights, double c_max,
                                              bool* warned = nullptr);

  // Pr[r <= z], right-continuous.
  double cdf(double z) const;

  // Pr[r >= z].
  double tail_prob(double z) const;

  // E[max{c, r}]. Valid for any real c, including negative caps.
  double capped_expectation(double c) const;

  double mean() const { return mean_; }

  // Distribution with CDF min{F(z + eps) + eps, 1}; mass pushed below zero
  // collapses onto the atom 0. Stochastically dominated by *this.
  DiscreteValueDistribution shift_plus_eps(double eps) const;

  double sample(Rng& rng) const;

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double c_max() const { return c_max_; }
  double min_atom() const { return atoms_.front(); }
  double max_atom() const { return atoms_.back(); }
  std::size_t size() const { return atoms_.size(); }

  bool approx_equal(const DiscreteValueDistribution& other, double tol = 1e-12) const;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<double> cum_;        // cum_[i] = sum of weights_[0..i]
  std::vector<double> suffix_wa_;  // suffix_wa_[i] = sum_{j>=i} w_j * a_j
  double c_max_ = 1.0;
  double mean_ = 0.0;
};

}  // namespace cvl
