#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "cvl/rng.hpp"
#include "cvl/value_dist.hpp"

namespace cvl {

struct LabeledSample {
  std::vector<double> context;
  double label = 0.0;
};

// Discrete distribution over vectors in [0,1]^d.
class WeightDistribution {
 public:
  WeightDistribution(std::size_t dim, std::vector<std::vector<double>> atoms,
                     std::vector<double> weights);

  // Uniform weights 1/k on the given atoms (the learner's hypothesis class).
  static WeightDistribution uniform(std::vector<std::vector<double>> atoms);
  static WeightDistribution point_mass(std::vector<double> atom);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<std::vector<double>>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  bool is_uniform(double tol = 1e-12) const;

  const std::vector<double>& sample(Rng& rng) const;

 private:
  std::size_t dim_;
  std::vector<std::vector<double>> atoms_;
  std::vector<double> weights_;
  std::vector<double> cum_;
};

class ContextDistribution {
 public:
  enum class Kind { Finite, ProductUniform };

  static ContextDistribution finite(std::vector<std::vector<double>> atoms,
                                    std::vector<double> weights);
  // Independent per-coordinate uniform draw from the grid {0, step, ..., <=1}.
  static ContextDistribution product_uniform(std::size_t dim, double step);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double step() const { return step_; }
  const std::vector<std::vector<double>>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

  std::vector<double> sample(Rng& rng) const;

 private:
  ContextDistribution() = default;

  Kind kind_ = Kind::Finite;
  std::size_t dim_ = 0;
  double step_ = 0.0;  // ProductUniform only
  std::vector<std::vector<double>> atoms_;
  std::vector<double> weights_;
  std::vector<double> cum_;
};

// Known reward map f(v, x) with declared range bound c_max and Lipschitz
// constant xi in v. Evaluations clamp to [0, c_max]; a counter records
// clamping events.
class RewardFunction {
 public:
  enum class Kind { Linear, MaxAffine, Gate };

  struct AffinePiece {
    std::vector<double> a;      // coefficients on v
    std::vector<double> b_ctx;  // coefficients on x
    double b0 = 0.0;
  };

  // f(v, x) = <v, x>; c_max = d, xi = sqrt(d).
  static RewardFunction linear(std::size_t dim);
  // f(v, x) = (1 - x_1 v_1) v_2; nonconvex in v, kept for its modelling value.
  static RewardFunction gate();
  static RewardFunction max_affine(std::size_t dim, std::vector<AffinePiece> pieces,
                                   double c_max, double xi);

  RewardFunction(const RewardFunction& other);
  RewardFunction& operator=(const RewardFunction& other);

  double eval(std::span<const double> v, std::span<const double> x) const;
  // Subgradient of the clamped reward in v. At a kink the active (max) branch
  // with the lowest piece index is selected.
  void grad_v(std::span<const double> v, std::span<const double> x,
              std::span<double> out) const;

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double c_max() const { return c_max_; }
  double xi() const { return xi_; }
  bool convex() const { return convex_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  std::uint64_t clamp_events() const { return clamp_count_.load(); }
  void reset_clamp_events() const { clamp_count_.store(0); }

 private:
  RewardFunction() = default;
  double raw_eval(std::span<const double> v, std::span<const double> x) const;

  Kind kind_ = Kind::Linear;
  std::size_t dim_ = 0;
  double c_max_ = 1.0;
  double xi_ = 1.0;
  bool convex_ = true;
  std::vector<AffinePiece> pieces_;
  mutable std::atomic<std::uint64_t> clamp_count_{0};
};

struct InstanceSpec {
  std::size_t n;
  ContextDistribution context;
  RewardFunction reward;
  std::vector<WeightDistribution> truths;  // one ground truth per index
  std::uint64_t seed = 0;
};

struct LipschitzReport {
  double max_ratio_v = 0.0;
  double max_ratio_x = 0.0;
  double declared_xi = 0.0;
  double declared_context_bound = 0.0;  // sqrt(d)
  bool xi_exceeded = false;
  bool context_bound_exceeded = false;
  bool nonconvex_kind = false;
};

std::vector<LabeledSample> draw_samples(const WeightDistribution& v,
                                        const ContextDistribution& x,
                                        const RewardFunction& f, std::size_t m, Rng& rng);

// Pushes every weight atom through f(., x); exact, equal images merged.
DiscreteValueDistribution induced_value_distribution(const WeightDistribution& v,
                                                     const RewardFunction& f,
                                                     std::span<const double> x);

LipschitzReport certify_lipschitz(const RewardFunction& f, std::size_t trials, Rng& rng);

}  // namespace cvl
