#include "mdgan/sgmm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mdgan/simd/kernels.hpp"

namespace mdgan {

SimplexMixture::SimplexMixture(std::size_t dim, double sigma, double circumradius)
    : SimplexMixture(build_simplex(dim, circumradius), sigma) {}

SimplexMixture::SimplexMixture(SimplexVertices vertices, double sigma)
    : vertices_(std::move(vertices)), sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("SimplexMixture: sigma must be a positive finite number");
  if (vertices_.dim == 0 || vertices_.vertices.rows() != vertices_.dim + 1 ||
      vertices_.vertices.cols() != vertices_.dim)
    throw std::invalid_argument("SimplexMixture: vertex matrix must be (dim+1) x dim");
  const double d = static_cast<double>(vertices_.dim);
  log_lambda_ = -0.5 * d * std::log(2.0 * std::numbers::pi * sigma * sigma);
}

void SimplexMixture::check_dim(std::size_t n) const {
  if (n != dim())
    throw std::invalid_argument("SimplexMixture: embedding has dimension " + std::to_string(n) +
                                ", expected " + std::to_string(dim()));
}

NearestComponent SimplexMixture::nearest_component(std::span<const double> e) const {
  check_dim(e.size());
  const auto& k = simd::kernels();
  NearestComponent best{0, k.squared_distance(e.data(), vertices_.vertices.row(0).data(), dim())};
  for (std::size_t i = 1; i < components(); ++i) {
    const double d2 = k.squared_distance(e.data(), vertices_.vertices.row(i).data(), dim());
    if (d2 < best.squared_distance) best = {i, d2};
  }
  return best;
}

double SimplexMixture::log_lk(std::span<const double> e) const {
  const NearestComponent nc = nearest_component(e);
  return log_lambda_ - nc.squared_distance / (2.0 * sigma_ * sigma_);
}

std::vector<double> SimplexMixture::log_lk_grad(std::span<const double> e) const {
  const NearestComponent nc = nearest_component(e);
  const auto mu = mean(nc.index);
  const double inv_var = 1.0 / (sigma_ * sigma_);
  std::vector<double> g(dim());
  for (std::size_t j = 0; j < dim(); ++j) g[j] = (mu[j] - e[j]) * inv_var;
  return g;
}

std::vector<double> SimplexMixture::log_lk_batch(const Matrix& embeddings, Matrix* grad) const {
  check_dim(embeddings.cols());
  std::vector<double> out(embeddings.rows());
  if (grad != nullptr) *grad = Matrix(embeddings.rows(), embeddings.cols());
  const double inv_var = 1.0 / (sigma_ * sigma_);
  for (std::size_t r = 0; r < embeddings.rows(); ++r) {
    const auto e = embeddings.row(r);
    const NearestComponent nc = nearest_component(e);
    out[r] = log_lambda_ - nc.squared_distance / (2.0 * sigma_ * sigma_);
    if (grad != nullptr) {
      const auto mu = mean(nc.index);
      auto g = grad->row(r);
      for (std::size_t j = 0; j < dim(); ++j) g[j] = (mu[j] - e[j]) * inv_var;
    }
  }
  return out;
}

}  // namespace mdgan
