#include "mdgan/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mdgan {

double SimplexVertices::edge_length() const {
  const double d = static_cast<double>(dim);
  return circumradius * std::sqrt(2.0 * (d + 1.0) / d);
}

SimplexVertices build_simplex(std::size_t dim, double circumradius) {
  if (dim == 0) throw std::invalid_argument("build_simplex: dim must be >= 1");
  if (!(circumradius > 0.0) || !std::isfinite(circumradius))
    throw std::invalid_argument("build_simplex: circumradius must be a positive finite number");

  const std::size_t n = dim + 1;
  const double centroid = 1.0 / static_cast<double>(n);

  // centered[i] = e_i - (1/n) * ones, i = 0..dim
  Matrix centered(n, n, -centroid);
  for (std::size_t i = 0; i < n; ++i) centered(i, i) += 1.0;

  // Orthonormal basis of the sum-zero hyperplane, one basis vector per row.
  Matrix basis(dim, n);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> v(centered.row(j).begin(), centered.row(j).end());
    for (std::size_t p = 0; p < j; ++p) {
      double proj = 0.0;
      for (std::size_t c = 0; c < n; ++c) proj += v[c] * basis(p, c);
      for (std::size_t c = 0; c < n; ++c) v[c] -= proj * basis(p, c);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < n; ++c) basis(j, c) = v[c] / norm;
  }

  SimplexVertices out;
  out.dim = dim;
  out.circumradius = circumradius;
  out.vertices = Matrix(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      double coord = 0.0;
      for (std::size_t c = 0; c < n; ++c) coord += centered(i, c) * basis(j, c);
      out.vertices(i, j) = coord;
      norm += coord * coord;
    }
    const double scale = circumradius / std::sqrt(norm);
    for (std::size_t j = 0; j < dim; ++j) out.vertices(i, j) *= scale;
  }
  return out;
}

}  // namespace mdgan
