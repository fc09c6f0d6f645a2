#include "cvl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cvl {

namespace {

std::uint64_t ceil_to_count(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("sample-size formula overflowed");
  }
  const double c = std::ceil(value - 1e-9);
  if (c >= 1.8e19) throw std::invalid_argument("sample-size formula overflowed");
  return c <= 0.0 ? 0 : static_cast<std::uint64_t>(c);
}

void check_positive(std::initializer_list<double> values, const char* where) {
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(where) + ": inputs must be positive");
  }
}

}  // namespace

double lipschitz_bound(double c_max, double epsilon, double xi, std::size_t k) {
  check_positive({c_max, epsilon, xi, static_cast<double>(k)}, "lipschitz_bound");
  return 2.0 * c_max * c_max * xi / (epsilon * std::sqrt(static_cast<double>(k)));
}

double regularization_lambda(double rho, double B, std::size_t m) {
  if (!(B > 0.0)) throw std::invalid_argument("regularization_lambda: B must be positive");
  if (m == 0) throw std::invalid_argument("regularization_lambda: m must be >= 1");
  if (rho < 0.0) throw std::invalid_argument("regularization_lambda: rho must be nonnegative");
  return std::sqrt(2.0 * rho * rho / (B * B * static_cast<double>(m)));
}

std::uint64_t required_samples_loss(std::size_t d, double xi, double c_max, double epsilon,
                                    double delta) {
  check_positive({static_cast<double>(d), xi, c_max, epsilon, delta}, "required_samples_loss");
  const double num = 32.0 * static_cast<double>(d) * xi * xi * std::pow(c_max, 4.0);
  return ceil_to_count(num / (std::pow(epsilon, 4.0) * delta * delta));
}

std::uint64_t required_samples_capped(std::size_t d, double xi, double c_max, double epsilon,
                                      double delta) {
  return required_samples_loss(d, xi, c_max, epsilon * epsilon, delta);
}

std::uint64_t required_samples_levy(std::size_t d, double xi, double c_max, double epsilon,
                                    double delta) {
  return required_samples_loss(d, xi, c_max, std::pow(epsilon, 4.0) / 2.0, delta);
}

std::uint64_t support_size_heuristic(std::size_t d, double c_max, double epsilon) {
  check_positive({static_cast<double>(d), c_max, epsilon}, "support_size_heuristic");
  const double dd = static_cast<double>(d);
  const double bound = 2.0 * std::pow(c_max, 3.0) / (epsilon * epsilon) *
                       (dd * std::log(dd * c_max) + (dd + 1.0) * std::log(2.0 / epsilon));
  if (!(bound > 0.0)) return 1;
  return std::max<std::uint64_t>(1, ceil_to_count(bound));
}

LearnResult learn(std::span<const LabeledSample> samples, const RewardFunction& f,
                  const LearnerConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("learn: empty sample set");
  if (cfg.k == 0 || cfg.iterations == 0) {
    throw std::invalid_argument("learn: k and iterations must be >= 1");
  }
  const std::size_t d = f.dim();
  for (const LabeledSample& s : samples) {
    if (s.context.size() != d) throw std::invalid_argument("learn: sample dimension mismatch");
  }
  const std::size_t k = cfg.k;
  const std::size_t m = samples.size();
  const CapGrid grid = cap_grid(f.c_max(), cfg.epsilon);
  const double rho = lipschitz_bound(f.c_max(), cfg.epsilon, f.xi(), k);
  const double B = std::sqrt(static_cast<double>(k * d));
  const double lambda =
      cfg.lambda_override ? *cfg.lambda_override : regularization_lambda(rho, B, m);

  Rng rng(cfg.seed);
  std::vector<std::vector<double>> atoms(k, std::vector<double>(d));
  for (auto& atom : atoms) {
    for (double& c : atom) c = rng.uniform01();
  }

  const double T = static_cast<double>(cfg.iterations);
  double eta0;
  if (cfg.eta0) {
    eta0 = *cfg.eta0;
  } else if (cfg.step_schedule == LearnerConfig::Step::InvSqrt) {
    eta0 = B / rho;
  } else {
    eta0 = B / (rho * std::sqrt(T));
  }
  if (!(eta0 > 0.0)) throw std::invalid_argument("learn: step size must be positive");

  const double inv_k = 1.0 / static_cast<double>(k);
  const double inv_m = 1.0 / static_cast<double>(m);
  const std::size_t caps = grid.values.size();

  std::vector<std::vector<double>> grad(k, std::vector<double>(d));
  std::vector<double> images(k);
  std::vector<double> residuals(caps);
  std::vector<double> fgrad(d);
  std::vector<std::vector<double>> best_atoms = atoms;
  std::vector<std::vector<double>> avg_atoms(k, std::vector<double>(d, 0.0));
  double best_objective = std::numeric_limits<double>::infinity();

  LearnResult result{WeightDistribution::uniform(atoms), {}, lambda, rho, 0.0};
  result.objective_trajectory.reserve(cfg.iterations);

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    // One fused pass: empirical loss and its subgradient at the current
    // iterate, samples reduced in fixed order.
    double loss = 0.0;
    for (auto& row : grad) std::fill(row.begin(), row.end(), 0.0);
    for (const LabeledSample& s : samples) {
      for (std::size_t i = 0; i < k; ++i) images[i] = f.eval(atoms[i], s.context);
      for (std::size_t ci = 0; ci < caps; ++ci) {
        const double c = grid.values[ci];
        double e = 0.0;
        for (std::size_t i = 0; i < k; ++i) e += std::max(c, images[i]);
        e *= inv_k;
        const double r = e - std::max(c, s.label);
        residuals[ci] = r;
        loss += r * r;
      }
      for (std::size_t i = 0; i < k; ++i) {
        double coeff = 0.0;
        for (std::size_t ci = 0; ci < caps; ++ci) {
          if (images[i] >= grid.values[ci]) coeff += 2.0 * residuals[ci];
        }
        if (coeff == 0.0) continue;
        f.grad_v(atoms[i], s.context, fgrad);
        const double scale = coeff * inv_k * inv_m;
        for (std::size_t j = 0; j < d; ++j) grad[i][j] += scale * fgrad[j];
      }
    }
    loss *= inv_m;

    double sq_norm = 0.0;
    for (const auto& atom : atoms) {
      for (double c : atom) sq_norm += c * c;
    }
    const double objective = loss + lambda * sq_norm;
    result.objective_trajectory.emplace_back(t, objective);
    if (objective < best_objective) {
      best_objective = objective;
      best_atoms = atoms;
    }
    if (cfg.average_iterates) {
      const double w = 1.0 / static_cast<double>(t);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          avg_atoms[i][j] += (atoms[i][j] - avg_atoms[i][j]) * w;
        }
      }
    }

    const double eta = cfg.step_schedule == LearnerConfig::Step::InvSqrt
                           ? eta0 / std::sqrt(static_cast<double>(t))
                           : eta0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double step = grad[i][j] + 2.0 * lambda * atoms[i][j];
        atoms[i][j] = std::clamp(atoms[i][j] - eta * step, 0.0, 1.0);
      }
    }
  }

  result.learned = WeightDistribution::uniform(cfg.average_iterates ? avg_atoms : best_atoms);
  result.best_objective = best_objective;
  return result;
}

}  // namespace cvl
