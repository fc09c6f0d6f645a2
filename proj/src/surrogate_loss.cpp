#include "cvl/surrogate_loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvl {

namespace {

// Images f(v_i, x) over the atoms of a weight distribution.
std::vector<double> atom_images(const WeightDistribution& v, const RewardFunction& f,
                                std::span<const double> x) {
  if (v.dim() != f.dim() || x.size() != f.dim()) {
    throw std::invalid_argument("surrogate loss: dimension mismatch");
  }
  std::vector<double> images;
  images.reserve(v.size());
  for (const auto& atom : v.atoms()) images.push_back(f.eval(atom, x));
  return images;
}

double capped_mean(std::span<const double> images, std::span<const double> weights, double c) {
  double e = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    e += weights[i] * std::max(c, images[i]);
  }
  return e;
}

}  // namespace

CapGrid cap_grid(double c_max, double epsilon) {
  if (!(c_max > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("cap_grid: c_max and epsilon must be positive");
  }
  if (epsilon > c_max) {
    throw std::invalid_argument("cap_grid: epsilon must not exceed c_max");
  }
  CapGrid grid;
  grid.epsilon = epsilon;
  grid.c_max = c_max;
  for (std::size_t i = 0;; ++i) {
    const double c = static_cast<double>(i) * epsilon;
    if (c >= c_max - 1e-12 * std::max(1.0, c_max)) break;
    grid.values.push_back(c);
  }
  if (grid.values.empty()) grid.values.push_back(0.0);
  return grid;
}

double sample_loss(const WeightDistribution& v, const LabeledSample& s,
                   const RewardFunction& f, const CapGrid& grid) {
  const std::vector<double> images = atom_images(v, f, s.context);
  double loss = 0.0;
  for (double c : grid.values) {
    const double e = capped_mean(images, v.weights(), c);
    const double target = std::max(c, s.label);
    loss += (e - target) * (e - target);
  }
  return loss;
}

double empirical_loss(const WeightDistribution& v, std::span<const LabeledSample> samples,
                      const RewardFunction& f, const CapGrid& grid) {
  if (samples.empty()) throw std::invalid_argument("empirical_loss: empty sample set");
  double total = 0.0;
  for (const LabeledSample& s : samples) {
    total += sample_loss(v, s, f, grid);
  }
  return total / static_cast<double>(samples.size());
}

double true_loss_at_context(const WeightDistribution& vp, const WeightDistribution& vstar,
                            const RewardFunction& f, std::span<const double> x,
                            const CapGrid& grid) {
  const std::vector<double> vp_images = atom_images(vp, f, x);
  const std::vector<double> star_images = atom_images(vstar, f, x);
  double loss = 0.0;
  for (double c : grid.values) {
    const double e = capped_mean(vp_images, vp.weights(), c);
    double term = 0.0;
    for (std::size_t j = 0; j < star_images.size(); ++j) {
      const double dev = e - std::max(c, star_images[j]);
      term += vstar.weights()[j] * dev * dev;
    }
    loss += term;
  }
  return loss;
}

std::vector<double> loss_gap_decomposition(const WeightDistribution& vp,
                                           const WeightDistribution& vstar,
                                           const RewardFunction& f, std::span<const double> x,
                                           const CapGrid& grid) {
  const std::vector<double> vp_images = atom_images(vp, f, x);
  const std::vector<double> star_images = atom_images(vstar, f, x);
  std::vector<double> gaps;
  gaps.reserve(grid.values.size());
  for (double c : grid.values) {
    const double delta =
        capped_mean(vp_images, vp.weights(), c) - capped_mean(star_images, vstar.weights(), c);
    gaps.push_back(delta * delta);
  }
  return gaps;
}

std::vector<std::vector<double>> loss_subgradient(const WeightDistribution& v,
                                                  std::span<const LabeledSample> samples,
                                                  const RewardFunction& f,
                                                  const CapGrid& grid) {
  if (!v.is_uniform()) {
    throw std::invalid_argument("loss_subgradient: distribution must have uniform weights");
  }
  if (samples.empty()) throw std::invalid_argument("loss_subgradient: empty sample set");
  const std::size_t k = v.size();
  const std::size_t d = v.dim();
  const double inv_k = 1.0 / static_cast<double>(k);
  const double inv_m = 1.0 / static_cast<double>(samples.size());

  std::vector<std::vector<double>> grad(k, std::vector<double>(d, 0.0));
  std::vector<double> images(k);
  std::vector<double> residuals(grid.values.size());
  std::vector<double> fgrad(d);
  for (const LabeledSample& s : samples) {
    if (s.context.size() != d) throw std::invalid_argument("loss_subgradient: dimension mismatch");
    for (std::size_t i = 0; i < k; ++i) images[i] = f.eval(v.atoms()[i], s.context);
    for (std::size_t ci = 0; ci < grid.values.size(); ++ci) {
      const double c = grid.values[ci];
      residuals[ci] = capped_mean(images, v.weights(), c) - std::max(c, s.label);
    }
    for (std::size_t i = 0; i < k; ++i) {
      // sum over caps active at this atom of 2 * residual(c)
      double coeff = 0.0;
      for (std::size_t ci = 0; ci < grid.values.size(); ++ci) {
        if (images[i] >= grid.values[ci]) coeff += 2.0 * residuals[ci];
      }
      if (coeff == 0.0) continue;
      f.grad_v(v.atoms()[i], s.context, fgrad);
      const double scale = coeff * inv_k * inv_m;
      for (std::size_t j = 0; j < d; ++j) grad[i][j] += scale * fgrad[j];
    }
  }
  return grad;
}

}  // namespace cvl
