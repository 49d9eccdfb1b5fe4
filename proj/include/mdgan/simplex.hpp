#pragma once

#include <cstddef>

#include "mdgan/tensor.hpp"

namespace mdgan {

// Vertices of a regular dim-simplex centered at the origin, one per row of a
// (dim+1) x dim matrix. Row i is derived from the standard basis vector e_{i+1};
// that order is part of the checkpoint contract.
struct SimplexVertices {
  std::size_t dim = 0;
  double circumradius = 0.0;
  Matrix vertices;

  std::size_t count() const { return vertices.rows(); }
  // Edge length of the regular simplex with this circumradius.
  double edge_length() const;
};

// Construction: center e_1..e_{dim+1} in R^{dim+1}, orthonormalize the first
// dim centered vectors by modified Gram-Schmidt in index order, project every
// centered vector onto that basis, then rescale each vertex to norm
// circumradius. Bit-identical for equal arguments.
//
// Throws std::invalid_argument when dim == 0 or circumradius <= 0.
SimplexVertices build_simplex(std::size_t dim, double circumradius = 1.0);

}  // namespace mdgan
