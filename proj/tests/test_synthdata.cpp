#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mdgan/synthdata.hpp"

using namespace mdgan;

TEST(GridDataset, DefaultCenters) {
  const GridDataset ds;
  ASSERT_EQ(ds.mode_count(), 25u);
  const double coords[] = {-4, -2, 0, 2, 4};
  for (std::size_t ix = 0; ix < 5; ++ix)
    for (std::size_t iy = 0; iy < 5; ++iy) {
      EXPECT_EQ(ds.centers()(ix * 5 + iy, 0), coords[ix]);
      EXPECT_EQ(ds.centers()(ix * 5 + iy, 1), coords[iy]);
    }
}

TEST(GridDataset, ZeroSigmaReturnsExactCenters) {
  const GridDataset ds(5, 2.0, 0.0);
  Rng rng(1);
  const Matrix pts = sample_real(ds, 500, rng);
  for (std::size_t r = 0; r < pts.rows(); ++r) {
    bool hit = false;
    for (std::size_t c = 0; c < 25; ++c)
      hit = hit || (pts(r, 0) == ds.centers()(c, 0) && pts(r, 1) == ds.centers()(c, 1));
    EXPECT_TRUE(hit) << r;
  }
}

TEST(GridDataset, ModeFrequenciesWithinBinomialBounds) {
  // Each mode has probability 1/25; 5 binomial standard deviations.
  const GridDataset ds;
  Rng rng(2);
  const std::size_t n = 100000;
  const Matrix pts = sample_real(ds, n, rng);
  std::vector<std::size_t> counts(25, 0);
  std::vector<double> sum_sq(25, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const long ix = std::lround((pts(r, 0) + 4.0) / 2.0);
    const long iy = std::lround((pts(r, 1) + 4.0) / 2.0);
    const std::size_t c = static_cast<std::size_t>(ix * 5 + iy);
    ++counts[c];
    const double dx = pts(r, 0) - ds.centers()(c, 0);
    const double dy = pts(r, 1) - ds.centers()(c, 1);
    sum_sq[c] += dx * dx + dy * dy;
  }
  const double p = 1.0 / 25.0;
  const double mean = n * p;
  const double sd = std::sqrt(n * p * (1 - p));
  for (std::size_t c = 0; c < 25; ++c) {
    EXPECT_LE(std::abs(counts[c] - mean), 5 * sd) << c;
    const double per_axis_std = std::sqrt(sum_sq[c] / (2.0 * counts[c]));
    EXPECT_NEAR(per_axis_std, 0.05, 0.005) << c;
  }
}

TEST(Latent, NormalMomentsWithinCltBounds) {
  Rng rng(3);
  const std::size_t n = 4000;
  const Matrix z = sample_latent(LatentSpec{}, n, rng);
  ASSERT_EQ(z.cols(), 32u);
  long double s = 0, s2 = 0;
  for (double v : z.values()) {
    s += v;
    s2 += static_cast<long double>(v) * v;
  }
  const double count = static_cast<double>(z.size());
  EXPECT_LE(std::abs(static_cast<double>(s / count)), 5.0 / std::sqrt(count));
  // Var of z^2 is 2 for a standard normal.
  EXPECT_LE(std::abs(static_cast<double>(s2 / count) - 1.0), 5.0 * std::sqrt(2.0 / count));
}

TEST(Latent, UniformStaysInRange) {
  Rng rng(4);
  const Matrix z = sample_latent(LatentSpec{8, LatentDistribution::uniform}, 1000, rng);
  double lo = 1, hi = -1;
  for (double v : z.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GE(lo, -1.0);
  EXPECT_LE(hi, 1.0);
  EXPECT_LT(lo, -0.95);
  EXPECT_GT(hi, 0.95);
}

TEST(Sampling, DeterministicAndRejectsEmpty) {
  const GridDataset ds;
  Rng a(5), b(5);
  EXPECT_EQ(sample_real(ds, 64, a), sample_real(ds, 64, b));
  EXPECT_THROW(sample_real(ds, 0, a), std::invalid_argument);
  EXPECT_EQ(parse_latent_distribution("uniform"), LatentDistribution::uniform);
  EXPECT_THROW(parse_latent_distribution("cauchy"), std::invalid_argument);
}

TEST(Csv, HeaderAndRoundTrippableRows) {
  Matrix pts(2, 2, std::vector<double>{0.1, -2.0, 1.0 / 3.0, 4.0});
  std::ostringstream os;
  write_points_csv(os, pts, "generated");
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,y,kind");
  std::getline(is, line);
  EXPECT_EQ(line, "0.10000000000000001,-2,generated");
  std::getline(is, line);
  EXPECT_EQ(std::stod(line.substr(0, line.find(','))), 1.0 / 3.0);
  EXPECT_FALSE(std::getline(is, line));
}
