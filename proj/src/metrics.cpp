#include "mdgan/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <stdexcept>
#include <string>

#include "mdgan/simd/kernels.hpp"

namespace mdgan {
namespace {

constexpr double kPsdTolerance = 1e-10;

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenMatrix to_eigen(const Matrix& m) {
  return Eigen::Map<const EigenMatrix>(m.data(), static_cast<Eigen::Index>(m.rows()),
                                       static_cast<Eigen::Index>(m.cols()));
}

// Symmetric square root with the PSD check applied.
EigenMatrix psd_sqrt(const EigenMatrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<EigenMatrix> es(m);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -kPsdTolerance)
      throw std::invalid_argument(std::string("frechet_distance: ") + what +
                                  " is not positive semidefinite");
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

void check_psd(const EigenMatrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<EigenMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTolerance)
    throw std::invalid_argument(std::string("frechet_distance: ") + what +
                                " is not positive semidefinite");
}

}  // namespace

ModeReport mode_report(const Matrix& samples, const GridDataset& ds, double threshold_sigmas) {
  if (samples.rows() == 0) throw std::invalid_argument("mode_report: empty batch");
  if (samples.cols() != 2) throw std::invalid_argument("mode_report: samples must be n x 2");
  ModeReport rep;
  rep.per_mode_counts.assign(ds.mode_count(), 0);
  rep.n_samples = samples.rows();
  rep.threshold_sigmas = threshold_sigmas;

  const double radius = threshold_sigmas * ds.data_sigma();
  const double radius2 = radius * radius;
  const auto& k = simd::kernels();
  std::size_t hq = 0;
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < ds.mode_count(); ++c) {
      const double d2 = k.squared_distance(samples.row(r).data(), ds.centers().row(c).data(), 2);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
    if (best_d2 <= radius2) {
      ++rep.per_mode_counts[best];
      ++hq;
    }
  }
  rep.modes_captured = static_cast<std::size_t>(
      std::count_if(rep.per_mode_counts.begin(), rep.per_mode_counts.end(),
                    [](std::size_t c) { return c > 0; }));
  rep.hq_fraction = static_cast<double>(hq) / static_cast<double>(rep.n_samples);
  return rep;
}

std::string to_ndjson(const ModeReport& report) {
  nlohmann::ordered_json j;
  j["per_mode_counts"] = report.per_mode_counts;
  j["modes_captured"] = report.modes_captured;
  j["hq_fraction"] = report.hq_fraction;
  j["n_samples"] = report.n_samples;
  j["threshold_sigmas"] = report.threshold_sigmas;
  return j.dump();
}

GaussianSummary fit_gaussian(const Matrix& samples) {
  const std::size_t n = samples.rows();
  const std::size_t k = samples.cols();
  if (k == 0) throw std::invalid_argument("fit_gaussian: samples have no columns");
  if (n < k + 1)
    throw std::invalid_argument("fit_gaussian: need at least " + std::to_string(k + 1) +
                                " samples, got " + std::to_string(n));
  GaussianSummary out;
  out.mean.assign(k, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c) out.mean[c] += samples(r, c);
  for (double& m : out.mean) m /= static_cast<double>(n);

  Matrix cov(k, k);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < k; ++i) {
      const double di = samples(r, i) - out.mean[i];
      for (std::size_t j = 0; j < k; ++j) cov(i, j) += di * (samples(r, j) - out.mean[j]);
    }
  out.covariance = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      out.covariance(i, j) = 0.5 * (cov(i, j) + cov(j, i)) / static_cast<double>(n);
  return out;
}

double frechet_distance(const GaussianSummary& a, const GaussianSummary& b) {
  const std::size_t k = a.mean.size();
  if (b.mean.size() != k || a.covariance.rows() != k || a.covariance.cols() != k ||
      b.covariance.rows() != k || b.covariance.cols() != k)
    throw std::invalid_argument("frechet_distance: summaries have mismatched dimensions");

  if (a.mean == b.mean && a.covariance == b.covariance) return 0.0;

  double mean_term = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = a.mean[i] - b.mean[i];
    mean_term += d * d;
  }
  const EigenMatrix sa = to_eigen(a.covariance);
  const EigenMatrix sb = to_eigen(b.covariance);

  double cross_trace = 0.0;
  if (k == 2) {
    check_psd(sa, "first covariance");
    check_psd(sb, "second covariance");
    const EigenMatrix m = sa * sb;
    const double det = std::max(m.determinant(), 0.0);
    cross_trace = std::sqrt(std::max(m.trace() + 2.0 * std::sqrt(det), 0.0));
  } else {
    const EigenMatrix root_a = psd_sqrt(sa, "first covariance");
    check_psd(sb, "second covariance");
    const EigenMatrix inner = root_a * sb * root_a;
    Eigen::SelfAdjointEigenSolver<EigenMatrix> es(0.5 * (inner + inner.transpose()),
                                                   Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev[i] < -kPsdTolerance)
        throw std::invalid_argument("frechet_distance: covariance product is not PSD");
      cross_trace += std::sqrt(std::max(ev[i], 0.0));
    }
  }
  const double d2 = mean_term + sa.trace() + sb.trace() - 2.0 * cross_trace;
  return std::max(d2, 0.0);
}

}  // namespace mdgan
