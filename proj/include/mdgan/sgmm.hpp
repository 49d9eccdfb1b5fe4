#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdgan/simplex.hpp"
#include "mdgan/tensor.hpp"

namespace mdgan {

struct NearestComponent {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

// Simplex Gaussian mixture over d-dimensional embeddings: d+1 spherical
// components N(mu_i, sigma^2 I) centered on the simplex vertices, with
// hard-max weights (the most likely component gets weight 1, all others 0).
//
// Everything is evaluated in the log domain. lambda = (2 pi sigma^2)^{-d/2} is
// the peak density, attained at every mean, and is only ever held as
// log_lambda.
class SimplexMixture {
 public:
  SimplexMixture(std::size_t dim, double sigma, double circumradius = 1.0);
  SimplexMixture(SimplexVertices vertices, double sigma);

  std::size_t dim() const { return vertices_.dim; }
  std::size_t components() const { return vertices_.count(); }
  double sigma() const { return sigma_; }
  double circumradius() const { return vertices_.circumradius; }
  double log_lambda() const { return log_lambda_; }
  const SimplexVertices& vertices() const { return vertices_; }
  std::span<const double> mean(std::size_t i) const { return vertices_.vertices.row(i); }

  // argmin_i ||e - mu_i||^2, ties to the lowest index.
  NearestComponent nearest_component(std::span<const double> e) const;

  // log_lambda - min_i ||e - mu_i||^2 / (2 sigma^2)
  double log_lk(std::span<const double> e) const;

  // (mu_{i*} - e) / sigma^2 for the nearest component i*. On the tie set
  // this is the subgradient of the lowest-index tied component.
  std::vector<double> log_lk_grad(std::span<const double> e) const;

  // Row-wise log_lk over a batch; when grad is non-null it receives the
  // row-wise gradients (same shape as embeddings).
  std::vector<double> log_lk_batch(const Matrix& embeddings, Matrix* grad = nullptr) const;

 private:
  void check_dim(std::size_t n) const;

  SimplexVertices vertices_;
  double sigma_;
  double log_lambda_;
};

}  // namespace mdgan
