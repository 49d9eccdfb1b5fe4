#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mdgan/synthdata.hpp"
#include "mdgan/tensor.hpp"

namespace mdgan {

// Mode coverage of a batch of generated 2D points against the grid centers.
// A sample is high quality when it lies within threshold_sigmas * data_sigma
// of its nearest center, and is then counted toward that center. A mode is
// captured when it holds at least one high-quality sample.
struct ModeReport {
  std::vector<std::size_t> per_mode_counts;
  std::size_t modes_captured = 0;
  double hq_fraction = 0.0;
  std::size_t n_samples = 0;
  double threshold_sigmas = 3.0;

  bool operator==(const ModeReport&) const = default;
};

// Throws std::invalid_argument for an empty batch or non-2D samples.
ModeReport mode_report(const Matrix& samples, const GridDataset& ds, double threshold_sigmas = 3.0);

// Single NDJSON line (no trailing newline), keys in declaration order.
std::string to_ndjson(const ModeReport& report);

struct GaussianSummary {
  std::vector<double> mean;
  Matrix covariance;
};

// Maximum-likelihood fit: sample mean and 1/n covariance, symmetrized.
// Throws std::invalid_argument with fewer than k+1 samples.
GaussianSummary fit_gaussian(const Matrix& samples);

// ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}).
//
// 2x2 covariances use tr((S_a S_b)^{1/2}) = sqrt(tr M + 2 sqrt(det M)),
// M = S_a S_b. Other sizes go through the eigendecomposition of
// S_a^{1/2} S_b S_a^{1/2}. Eigenvalues down to -1e-10 are clipped to zero;
// anything more negative is rejected with std::invalid_argument, as are
// dimension mismatches.
double frechet_distance(const GaussianSummary& a, const GaussianSummary& b);

}  // namespace mdgan
