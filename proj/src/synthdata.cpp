#include "mdgan/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mdgan {

GridDataset::GridDataset(std::size_t grid_size, double spacing, double data_sigma)
    : grid_size_(grid_size), spacing_(spacing), data_sigma_(data_sigma) {
  if (grid_size == 0) throw std::invalid_argument("GridDataset: grid_size must be >= 1");
  if (!(spacing > 0.0)) throw std::invalid_argument("GridDataset: spacing must be positive");
  if (!(data_sigma >= 0.0)) throw std::invalid_argument("GridDataset: data_sigma must be >= 0");
  centers_ = Matrix(grid_size * grid_size, 2);
  // Integer offsets keep the centers exact: (i - (g-1)/2) * spacing.
  const auto coord = [&](std::size_t i) {
    return (2.0 * static_cast<double>(i) - static_cast<double>(grid_size - 1)) * 0.5 * spacing;
  };
  for (std::size_t ix = 0; ix < grid_size; ++ix)
    for (std::size_t iy = 0; iy < grid_size; ++iy) {
      centers_(ix * grid_size + iy, 0) = coord(ix);
      centers_(ix * grid_size + iy, 1) = coord(iy);
    }
}

std::string_view to_string(LatentDistribution d) {
  return d == LatentDistribution::standard_normal ? "normal" : "uniform";
}

LatentDistribution parse_latent_distribution(std::string_view text) {
  if (text == "normal") return LatentDistribution::standard_normal;
  if (text == "uniform") return LatentDistribution::uniform;
  throw std::invalid_argument("unknown latent distribution '" + std::string(text) + "'");
}

Matrix sample_real(const GridDataset& ds, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_real: n must be >= 1");
  std::uniform_int_distribution<std::size_t> pick(0, ds.mode_count() - 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix out(n, 2);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = pick(rng);
    const double nx = noise(rng);
    const double ny = noise(rng);
    out(r, 0) = ds.centers()(c, 0) + ds.data_sigma() * nx;
    out(r, 1) = ds.centers()(c, 1) + ds.data_sigma() * ny;
  }
  return out;
}

Matrix sample_latent(const LatentSpec& spec, std::size_t n, Rng& rng) {
  if (spec.latent_dim == 0) throw std::invalid_argument("sample_latent: latent_dim must be >= 1");
  if (n == 0) throw std::invalid_argument("sample_latent: n must be >= 1");
  Matrix out(n, spec.latent_dim);
  if (spec.distribution == LatentDistribution::standard_normal) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : out.values()) v = dist(rng);
  } else {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : out.values()) v = dist(rng);
  }
  return out;
}

void write_points_csv(std::ostream& os, const Matrix& points, std::string_view kind, bool header) {
  if (points.cols() != 2) throw std::invalid_argument("write_points_csv: points must be n x 2");
  if (header) os << "x,y,kind\n";
  char buf[64];
  for (std::size_t r = 0; r < points.rows(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", points(r, 0), points(r, 1));
    os << buf << kind << '\n';
  }
}

}  // namespace mdgan
