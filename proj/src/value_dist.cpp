#include "cvl/value_dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cvl {

namespace {
constexpr double kAtomMergeTol = 1e-12;
constexpr double kWeightSumTol = 1e-12;
constexpr double kDropTol = 1e-15;
}  // namespace

DiscreteValueDistribution::DiscreteValueDistribution(std::vector<double> atoms,
                                                    std::vector<double> weights,
                                                    double c_max)
    : c_max_(c_max) {
  if (!(c_max > 0.0)) {
    throw std::invalid_argument("DiscreteValueDistribution: c_max must be positive");
  }
  if (atoms.size() != weights.size() || atoms.empty()) {
    throw std::invalid_argument("DiscreteValueDistribution: atoms/weights size mismatch or empty");
  }
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  for (std::size_t idx : order) {
    const double a = atoms[idx];
    const double w = weights[idx];
    if (w < 0.0) {
      throw std::invalid_argument("DiscreteValueDistribution: negative weight");
    }
    if (a < -kAtomMergeTol || a > c_max + 1e-9) {
      throw std::invalid_argument("DiscreteValueDistribution: atom outside [0, c_max]");
    }
    if (w <= kDropTol) continue;
    const double clamped = std::clamp(a, 0.0, c_max);
    if (!atoms_.empty() && clamped - atoms_.back() <= kAtomMergeTol) {
      weights_.back() += w;
    } else {
      atoms_.push_back(clamped);
      weights_.push_back(w);
    }
  }
  if (atoms_.empty()) {
    throw std::invalid_argument("DiscreteValueDistribution: no atoms with positive weight");
  }

  double total = 0.0;
  for (double w : weights_) total += w;
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw std::invalid_argument("DiscreteValueDistribution: weights must sum to 1 within 1e-12");
  }
  cum_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cum_[i] = acc;
  }
  cum_.back() = 1.0;

  suffix_wa_.assign(atoms_.size() + 1, 0.0);
  for (std::size_t i = atoms_.size(); i-- > 0;) {
    suffix_wa_[i] = suffix_wa_[i + 1] + weights_[i] * atoms_[i];
  }
  mean_ = suffix_wa_[0];
}

DiscreteValueDistribution DiscreteValueDistribution::point_mass(double atom, double c_max) {
  return DiscreteValueDistribution({atom}, {1.0}, c_max);
}

DiscreteValueDistribution DiscreteValueDistribution::normalized(std::vector<double> atoms,
                                                                std::vector<double> weights,
                                                                double c_max, bool* warned) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    throw std::invalid_argument("DiscreteValueDistribution: nonpositive total weight");
  }
  if (warned != nullptr) {
    *warned = std::abs(total - 1.0) > 1e-9;
  }
  for (double& w : weights) w /= total;
  return DiscreteValueDistribution(std::move(atoms), std::move(weights), c_max);
}

double DiscreteValueDistribution::cdf(double z) const {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), z);
  const std::size_t i = static_cast<std::size_t>(it - atoms_.begin());
  return i == 0 ? 0.0 : cum_[i - 1];
}

double DiscreteValueDistribution::tail_prob(double z) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), z);
  const std::size_t i = static_cast<std::size_t>(it - atoms_.begin());
  return 1.0 - (i == 0 ? 0.0 : cum_[i - 1]);
}

double DiscreteValueDistribution::capped_expectation(double c) const {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), c);
  const std::size_t i = static_cast<std::size_t>(it - atoms_.begin());
  const double below = i == 0 ? 0.0 : cum_[i - 1];
  return c * below + suffix_wa_[i];
}

DiscreteValueDistribution DiscreteValueDistribution::shift_plus_eps(double eps) const {
  if (eps < 0.0) {
    throw std::invalid_argument("shift_plus_eps: eps must be nonnegative");
  }
  if (eps == 0.0) return *this;

  // Shifted atoms clamp at 0; the extra vertical mass eps lands at 0 and the
  // same amount is trimmed from the top by capping the cumulative at 1.
  std::vector<double> atoms;
  std::vector<double> weights;
  atoms.push_back(0.0);
  weights.push_back(eps);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const double b = std::max(atoms_[i] - eps, 0.0);
    if (b <= atoms.back() + kAtomMergeTol) {
      weights.back() += weights_[i];
    } else {
      atoms.push_back(b);
      weights.push_back(weights_[i]);
    }
  }
  std::vector<double> trimmed_atoms;
  std::vector<double> trimmed_weights;
  double prev_cum = 0.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    cum += weights[i];
    const double w = std::min(cum, 1.0) - std::min(prev_cum, 1.0);
    prev_cum = cum;
    if (w > kDropTol) {
      trimmed_atoms.push_back(atoms[i]);
      trimmed_weights.push_back(w);
    }
  }
  return DiscreteValueDistribution(std::move(trimmed_atoms), std::move(trimmed_weights), c_max_);
}

double DiscreteValueDistribution::sample(Rng& rng) const {
  return atoms_[rng.pick_cumulative(cum_)];
}

bool DiscreteValueDistribution::approx_equal(const DiscreteValueDistribution& other,
                                             double tol) const {
  if (atoms_.size() != other.atoms_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (std::abs(atoms_[i] - other.atoms_[i]) > tol) return false;
    if (std::abs(weights_[i] - other.weights_[i]) > tol) return false;
  }
  return true;
}

}  // namespace cvl
