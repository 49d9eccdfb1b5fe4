#pragma once

// Test-only reference computations. Each one is written independently of the
// library code path it is used to check: plain loops, long double where it
// matters, no SIMD kernels.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "mdgan/tensor.hpp"

namespace mdgan::oracle {

using Real = long double;

inline Real squared_distance(std::span<const double> a, std::span<const double> b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Real d = static_cast<Real>(a[i]) - static_cast<Real>(b[i]);
    s += d * d;
  }
  return s;
}

// Multivariate normal log-density with covariance sigma^2 I.
inline Real log_normal_density(std::span<const double> e, std::span<const double> mu, Real sigma) {
  const Real d = static_cast<Real>(e.size());
  return -0.5L * d * std::log(2.0L * std::numbers::pi_v<Real> * sigma * sigma) -
         squared_distance(e, mu) / (2.0L * sigma * sigma);
}

// Hard-max mixture: weight 1 on the most likely component, evaluated by
// scanning every component's full log-density.
inline Real hardmax_log_lk(std::span<const double> e, const Matrix& means, Real sigma) {
  Real best = -INFINITY;
  for (std::size_t i = 0; i < means.rows(); ++i)
    best = std::max(best, log_normal_density(e, means.row(i), sigma));
  return best;
}

// Full soft mixture with equal weights 1/n, via log-sum-exp.
inline Real soft_log_lk(std::span<const double> e, const Matrix& means, Real sigma) {
  std::vector<Real> terms;
  Real mx = -INFINITY;
  for (std::size_t i = 0; i < means.rows(); ++i) {
    terms.push_back(log_normal_density(e, means.row(i), sigma));
    mx = std::max(mx, terms.back());
  }
  Real s = 0;
  for (Real t : terms) s += std::exp(t - mx);
  return mx + std::log(s / static_cast<Real>(means.rows()));
}

inline Real sigmoid(Real x) { return 1.0L / (1.0L + std::exp(-x)); }

// Central differences of f at x.
inline std::vector<double> finite_difference(const std::function<double(std::span<const double>)>& f,
                                             std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// max_i |a_i - b_i| / max_i |b_i|
inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

inline double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace mdgan::oracle
