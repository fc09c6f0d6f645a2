#include "cvl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cvl {

namespace {

// Worst violation of "A(z) <= B(z + eps) + eps": max over the breakpoints of
// the left-hand side minus the shifted right-hand side. Both CDFs are
// right-continuous step functions, so the supremum over z is attained at a
// breakpoint of A or at a breakpoint of B shifted left by eps.
double shift_violation(const DiscreteValueDistribution& a, const DiscreteValueDistribution& b,
                       double eps) {
  // Nudge against rounding in p + eps landing a hair below an atom of b.
  const double nudge = 1e-13 * std::max(1.0, std::max(a.c_max(), b.c_max()));
  double worst = 0.0;
  for (double p : a.atoms()) {
    worst = std::max(worst, a.cdf(p) - b.cdf(p + eps + nudge));
  }
  for (double q : b.atoms()) {
    const double p = q - eps;
    worst = std::max(worst, a.cdf(p) - b.cdf(p + eps + nudge));
  }
  return worst;
}

bool levy_feasible(const DiscreteValueDistribution& d, const DiscreteValueDistribution& dp,
                   double eps) {
  return shift_violation(d, dp, eps) <= eps && shift_violation(dp, d, eps) <= eps;
}

}  // namespace

double capped_gap_sup(const DiscreteValueDistribution& d, const DiscreteValueDistribution& dp,
                      double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("capped_gap_sup: resolution must be > 0");
  const double hi = std::max(d.c_max(), dp.c_max());
  std::vector<double> candidates{0.0, hi};
  candidates.insert(candidates.end(), d.atoms().begin(), d.atoms().end());
  candidates.insert(candidates.end(), dp.atoms().begin(), dp.atoms().end());
  for (double c = 0.0; c < hi; c += resolution) candidates.push_back(c);
  double sup = 0.0;
  for (double c : candidates) {
    sup = std::max(sup, std::abs(d.capped_expectation(c) - dp.capped_expectation(c)));
  }
  return sup;
}

double levy_distance(const DiscreteValueDistribution& d, const DiscreteValueDistribution& dp) {
  if (levy_feasible(d, dp, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;  // vertical slack 1 is always feasible
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (levy_feasible(d, dp, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double levy_distance_oracle(const DiscreteValueDistribution& d,
                            const DiscreteValueDistribution& dp, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("levy_distance_oracle: step must be > 0");
  const double z_lo = -grid_step;
  const double z_hi = std::max(d.c_max(), dp.c_max()) + grid_step;
  std::vector<double> zs;
  for (double z = z_lo; z <= z_hi + 0.5 * grid_step; z += grid_step) zs.push_back(z);

  for (double eps = 0.0; eps <= 1.0 + 0.5 * grid_step; eps += grid_step) {
    bool ok = true;
    for (double z : zs) {
      const double f = d.cdf(z);
      const double g = dp.cdf(z);
      if (d.cdf(z - eps) - eps > g + 1e-12 || g > d.cdf(z + eps) + eps + 1e-12 ||
          dp.cdf(z - eps) - eps > f + 1e-12 || f > dp.cdf(z + eps) + eps + 1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) return eps;
  }
  return 1.0;
}

double wasserstein_distance(const DiscreteValueDistribution& d,
                            const DiscreteValueDistribution& dp) {
  std::vector<double> breaks;
  breaks.reserve(d.size() + dp.size());
  breaks.insert(breaks.end(), d.atoms().begin(), d.atoms().end());
  breaks.insert(breaks.end(), dp.atoms().begin(), dp.atoms().end());
  std::sort(breaks.begin(), breaks.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double width = breaks[i + 1] - breaks[i];
    if (width <= 0.0) continue;
    area += width * std::abs(d.cdf(breaks[i]) - dp.cdf(breaks[i]));
  }
  return area;
}

}  // namespace cvl
