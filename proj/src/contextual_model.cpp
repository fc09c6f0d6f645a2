#include "cvl/contextual_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvl {

namespace {

void validate_weights(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w <= 0.0) throw std::invalid_argument("weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("weights must sum to 1 within 1e-12");
  }
}

std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> cum(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;
  return cum;
}

void validate_unit_box(const std::vector<std::vector<double>>& atoms, std::size_t dim) {
  for (const auto& a : atoms) {
    if (a.size() != dim) throw std::invalid_argument("atom dimension mismatch");
    for (double c : a) {
      if (c < -1e-12 || c > 1.0 + 1e-12) {
        throw std::invalid_argument("atom coordinate outside [0,1]");
      }
    }
  }
}

void check_dims(std::span<const double> v, std::span<const double> x, std::size_t dim) {
  if (v.size() != dim || x.size() != dim) {
    throw std::invalid_argument("eval_reward: dimension mismatch");
  }
}

}  // namespace

WeightDistribution::WeightDistribution(std::size_t dim,
                                       std::vector<std::vector<double>> atoms,
                                       std::vector<double> weights)
    : dim_(dim), atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || atoms_.size() != weights_.size()) {
    throw std::invalid_argument("WeightDistribution: atoms/weights mismatch or empty");
  }
  validate_unit_box(atoms_, dim_);
  for (auto& a : atoms_) {
    for (double& c : a) c = std::clamp(c, 0.0, 1.0);
  }
  validate_weights(weights_);
  cum_ = cumulative(weights_);
}

WeightDistribution WeightDistribution::uniform(std::vector<std::vector<double>> atoms) {
  if (atoms.empty()) throw std::invalid_argument("WeightDistribution::uniform: empty support");
  const std::size_t k = atoms.size();
  const std::size_t dim = atoms.front().size();
  return WeightDistribution(dim, std::move(atoms),
                            std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

WeightDistribution WeightDistribution::point_mass(std::vector<double> atom) {
  return uniform({std::move(atom)});
}

bool WeightDistribution::is_uniform(double tol) const {
  const double u = 1.0 / static_cast<double>(weights_.size());
  for (double w : weights_) {
    if (std::abs(w - u) > tol) return false;
  }
  return true;
}

const std::vector<double>& WeightDistribution::sample(Rng& rng) const {
  return atoms_[rng.pick_cumulative(cum_)];
}

ContextDistribution ContextDistribution::finite(std::vector<std::vector<double>> atoms,
                                                std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw std::invalid_argument("ContextDistribution: atoms/weights mismatch or empty");
  }
  ContextDistribution d;
  d.kind_ = Kind::Finite;
  d.dim_ = atoms.front().size();
  validate_unit_box(atoms, d.dim_);
  validate_weights(weights);
  d.cum_ = cumulative(weights);
  d.atoms_ = std::move(atoms);
  d.weights_ = std::move(weights);
  return d;
}

ContextDistribution ContextDistribution::product_uniform(std::size_t dim, double step) {
  if (dim == 0) throw std::invalid_argument("ContextDistribution: dim must be positive");
  if (!(step > 0.0 && step <= 1.0)) {
    throw std::invalid_argument("ContextDistribution: step must be in (0, 1]");
  }
  ContextDistribution d;
  d.kind_ = Kind::ProductUniform;
  d.dim_ = dim;
  d.step_ = step;
  return d;
}

std::vector<double> ContextDistribution::sample(Rng& rng) const {
  if (kind_ == Kind::Finite) {
    return atoms_[rng.pick_cumulative(cum_)];
  }
  const std::size_t levels = static_cast<std::size_t>(std::floor(1.0 / step_ + 1e-9)) + 1;
  std::vector<double> x(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    x[j] = std::min(1.0, static_cast<double>(rng.pick_index(levels)) * step_);
  }
  return x;
}

RewardFunction RewardFunction::linear(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("RewardFunction::linear: dim must be positive");
  RewardFunction f;
  f.kind_ = Kind::Linear;
  f.dim_ = dim;
  f.c_max_ = static_cast<double>(dim);
  f.xi_ = std::sqrt(static_cast<double>(dim));
  f.convex_ = true;
  return f;
}

RewardFunction RewardFunction::gate() {
  RewardFunction f;
  f.kind_ = Kind::Gate;
  f.dim_ = 2;
  f.c_max_ = 1.0;
  // |grad_v| = sqrt(x1^2 v2^2 + (1 - x1 v1)^2) <= sqrt(2) on the unit box.
  f.xi_ = std::sqrt(2.0);
  f.convex_ = false;
  return f;
}

RewardFunction RewardFunction::max_affine(std::size_t dim, std::vector<AffinePiece> pieces,
                                          double c_max, double xi) {
  if (pieces.empty()) throw std::invalid_argument("max_affine: no pieces");
  if (!(c_max > 0.0) || !(xi > 0.0)) {
    throw std::invalid_argument("max_affine: c_max and xi must be positive");
  }
  for (const auto& p : pieces) {
    if (p.a.size() != dim || p.b_ctx.size() != dim) {
      throw std::invalid_argument("max_affine: piece dimension mismatch");
    }
  }
  RewardFunction f;
  f.kind_ = Kind::MaxAffine;
  f.dim_ = dim;
  f.c_max_ = c_max;
  f.xi_ = xi;
  f.convex_ = true;
  f.pieces_ = std::move(pieces);
  return f;
}

RewardFunction::RewardFunction(const RewardFunction& other)
    : kind_(other.kind_),
      dim_(other.dim_),
      c_max_(other.c_max_),
      xi_(other.xi_),
      convex_(other.convex_),
      pieces_(other.pieces_),
      clamp_count_(other.clamp_count_.load()) {}

RewardFunction& RewardFunction::operator=(const RewardFunction& other) {
  if (this != &other) {
    kind_ = other.kind_;
    dim_ = other.dim_;
    c_max_ = other.c_max_;
    xi_ = other.xi_;
    convex_ = other.convex_;
    pieces_ = other.pieces_;
    clamp_count_.store(other.clamp_count_.load());
  }
  return *this;
}

double RewardFunction::raw_eval(std::span<const double> v, std::span<const double> x) const {
  switch (kind_) {
    case Kind::Linear: {
      double s = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) s += v[j] * x[j];
      return s;
    }
    case Kind::Gate:
      return (1.0 - x[0] * v[0]) * v[1];
    case Kind::MaxAffine: {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& p : pieces_) {
        double s = p.b0;
        for (std::size_t j = 0; j < dim_; ++j) s += p.a[j] * v[j] + p.b_ctx[j] * x[j];
        best = std::max(best, s);
      }
      return best;
    }
  }
  return 0.0;
}

double RewardFunction::eval(std::span<const double> v, std::span<const double> x) const {
  check_dims(v, x, dim_);
  const double raw = raw_eval(v, x);
  if (raw < 0.0 || raw > c_max_) {
    clamp_count_.fetch_add(1, std::memory_order_relaxed);
    return std::clamp(raw, 0.0, c_max_);
  }
  return raw;
}

void RewardFunction::grad_v(std::span<const double> v, std::span<const double> x,
                            std::span<double> out) const {
  check_dims(v, x, dim_);
  if (out.size() != dim_) throw std::invalid_argument("grad_v: output dimension mismatch");
  const double raw = raw_eval(v, x);
  if (raw < 0.0 || raw > c_max_) {
    std::fill(out.begin(), out.end(), 0.0);  // flat on the clamped region
    return;
  }
  switch (kind_) {
    case Kind::Linear:
      std::copy(x.begin(), x.end(), out.begin());
      return;
    case Kind::Gate:
      std::fill(out.begin(), out.end(), 0.0);
      out[0] = -x[0] * v[1];
      out[1] = 1.0 - x[0] * v[0];
      return;
    case Kind::MaxAffine: {
      const AffinePiece* active = nullptr;
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& p : pieces_) {
        double s = p.b0;
        for (std::size_t j = 0; j < dim_; ++j) s += p.a[j] * v[j] + p.b_ctx[j] * x[j];
        if (s > best) {
          best = s;
          active = &p;
        }
      }
      std::copy(active->a.begin(), active->a.end(), out.begin());
      return;
    }
  }
}

std::vector<LabeledSample> draw_samples(const WeightDistribution& v,
                                        const ContextDistribution& x,
                                        const RewardFunction& f, std::size_t m, Rng& rng) {
  if (v.dim() != x.dim() || v.dim() != f.dim()) {
    throw std::invalid_argument("draw_samples: dimension mismatch");
  }
  std::vector<LabeledSample> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> ctx = x.sample(rng);
    const std::vector<double>& w = v.sample(rng);
    const double y = f.eval(w, ctx);
    out.push_back(LabeledSample{std::move(ctx), y});
  }
  return out;
}

DiscreteValueDistribution induced_value_distribution(const WeightDistribution& v,
                                                     const RewardFunction& f,
                                                     std::span<const double> x) {
  if (v.dim() != f.dim()) {
    throw std::invalid_argument("induced_value_distribution: dimension mismatch");
  }
  std::vector<double> images;
  images.reserve(v.size());
  for (const auto& atom : v.atoms()) {
    images.push_back(f.eval(atom, x));
  }
  return DiscreteValueDistribution(std::move(images), v.weights(), f.c_max());
}

LipschitzReport certify_lipschitz(const RewardFunction& f, std::size_t trials, Rng& rng) {
  if (trials == 0) throw std::invalid_argument("certify_lipschitz: trials must be >= 1");
  LipschitzReport rep;
  rep.declared_xi = f.xi();
  rep.declared_context_bound = std::sqrt(static_cast<double>(f.dim()));
  rep.nonconvex_kind = !f.convex();
  const std::size_t d = f.dim();
  std::vector<double> v1(d), v2(d), x1(d), x2(d);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t j = 0; j < d; ++j) {
      v1[j] = rng.uniform01();
      v2[j] = rng.uniform01();
      x1[j] = rng.uniform01();
      x2[j] = rng.uniform01();
    }
    double dv = 0.0, dx = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dv += (v1[j] - v2[j]) * (v1[j] - v2[j]);
      dx += (x1[j] - x2[j]) * (x1[j] - x2[j]);
    }
    dv = std::sqrt(dv);
    dx = std::sqrt(dx);
    if (dv > 1e-12) {
      const double num = std::abs(f.eval(v1, x1) - f.eval(v2, x1));
      rep.max_ratio_v = std::max(rep.max_ratio_v, num / dv);
    }
    if (dx > 1e-12) {
      const double num = std::abs(f.eval(v1, x1) - f.eval(v1, x2));
      rep.max_ratio_x = std::max(rep.max_ratio_x, num / dx);
    }
  }
  rep.xi_exceeded = rep.max_ratio_v > rep.declared_xi + 1e-9;
  rep.context_bound_exceeded = rep.max_ratio_x > rep.declared_context_bound + 1e-9;
  return rep;
}

}  // namespace cvl
