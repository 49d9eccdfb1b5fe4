#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "mdgan/mlp.hpp"
#include "mdgan/tensor.hpp"

namespace mdgan {

// Isotropic Gaussians centered on a square grid_size x grid_size lattice with
// the given spacing, symmetric about the origin. The defaults give the 25
// centers {-4,-2,0,2,4}^2 with standard deviation 0.05.
class GridDataset {
 public:
  explicit GridDataset(std::size_t grid_size = 5, double spacing = 2.0, double data_sigma = 0.05);

  std::size_t grid_size() const { return grid_size_; }
  double spacing() const { return spacing_; }
  double data_sigma() const { return data_sigma_; }
  std::size_t mode_count() const { return centers_.rows(); }
  // One center per row, row-major over (x index, y index).
  const Matrix& centers() const { return centers_; }

 private:
  std::size_t grid_size_;
  double spacing_;
  double data_sigma_;
  Matrix centers_;
};

enum class LatentDistribution { standard_normal, uniform };

std::string_view to_string(LatentDistribution d);
LatentDistribution parse_latent_distribution(std::string_view text);

struct LatentSpec {
  std::size_t latent_dim = 32;
  LatentDistribution distribution = LatentDistribution::standard_normal;
};

// n points: a uniformly chosen center plus N(0, data_sigma^2 I) noise.
// Throws std::invalid_argument for n == 0.
Matrix sample_real(const GridDataset& ds, std::size_t n, Rng& rng);

// n x latent_dim noise from N(0, 1) or U[-1, 1].
Matrix sample_latent(const LatentSpec& spec, std::size_t n, Rng& rng);

// CSV with header "x,y,kind"; one row per sample, all tagged with kind.
void write_points_csv(std::ostream& os, const Matrix& points, std::string_view kind,
                      bool header = true);

}  // namespace mdgan
