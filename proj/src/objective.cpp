#include "mdgan/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdgan {
namespace {

void require_batch(const Matrix& m, std::size_t cols, const char* what) {
  if (m.rows() == 0) throw std::invalid_argument(std::string(what) + ": empty batch");
  if (m.cols() != cols)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(cols) +
                                " columns, got " + std::to_string(m.cols()));
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double ex = std::exp(x);
  return ex / (1.0 + ex);
}

}  // namespace

std::string_view to_string(GeneratorMode mode) {
  return mode == GeneratorMode::minimax ? "minimax" : "nonsaturating";
}

GeneratorMode parse_generator_mode(std::string_view text) {
  if (text == "minimax") return GeneratorMode::minimax;
  if (text == "nonsaturating") return GeneratorMode::nonsaturating;
  throw std::invalid_argument("unknown generator mode '" + std::string(text) + "'");
}

void LossConfig::validate() const {
  if (!(clamp_epsilon > 0.0 && clamp_epsilon < 0.1))
    throw std::invalid_argument("clamp_epsilon must lie in (0, 0.1)");
}

double log_lambda_minus_lk(const SimplexMixture& mixture, std::span<const double> e,
                           const LossConfig& cfg, std::span<double> grad) {
  const NearestComponent nc = mixture.nearest_component(e);
  const double var = mixture.sigma() * mixture.sigma();
  const double delta = -nc.squared_distance / (2.0 * var);
  const bool clamped = delta > -cfg.clamp_epsilon;
  const double d = clamped ? -cfg.clamp_epsilon : delta;
  const double value = mixture.log_lambda() + std::log(-std::expm1(d));
  if (!grad.empty()) {
    if (grad.size() != e.size())
      throw std::invalid_argument("log_lambda_minus_lk: gradient size mismatch");
    if (clamped) {
      std::fill(grad.begin(), grad.end(), 0.0);
    } else {
      // d/d(delta) log(1 - exp(delta)) = -1 / expm1(-delta); d(delta)/de = (mu - e) / var
      const double outer = -1.0 / std::expm1(-d) / var;
      const auto mu = mixture.mean(nc.index);
      for (std::size_t j = 0; j < e.size(); ++j) grad[j] = outer * (mu[j] - e[j]);
    }
  }
  return value;
}

LossValue mdgan_fake_term(const SimplexMixture& mixture, const Matrix& fake_emb,
                          const LossConfig& cfg) {
  require_batch(fake_emb, mixture.dim(), "mdgan fake term");
  LossValue out;
  out.grad_fake = Matrix(fake_emb.rows(), fake_emb.cols());
  const double inv_n = 1.0 / static_cast<double>(fake_emb.rows());
  double sum = 0.0;
  for (std::size_t r = 0; r < fake_emb.rows(); ++r) {
    auto g = out.grad_fake.row(r);
    sum += log_lambda_minus_lk(mixture, fake_emb.row(r), cfg, g);
    for (double& v : g) v *= inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

LossValue d_loss_mdgan(const SimplexMixture& mixture, const Matrix& real_emb,
                       const Matrix& fake_emb, const LossConfig& cfg) {
  require_batch(real_emb, mixture.dim(), "d_loss_mdgan (real)");
  require_batch(fake_emb, mixture.dim(), "d_loss_mdgan (fake)");

  LossValue out = mdgan_fake_term(mixture, fake_emb, cfg);
  out.value = -out.value;
  for (double& v : out.grad_fake.values()) v = -v;

  const std::vector<double> ll = mixture.log_lk_batch(real_emb, &out.grad_real);
  const double inv_n = 1.0 / static_cast<double>(real_emb.rows());
  double sum = 0.0;
  for (double v : ll) sum += v;
  out.value -= sum * inv_n;
  for (double& v : out.grad_real.values()) v *= -inv_n;
  return out;
}

LossValue g_loss_mdgan(const SimplexMixture& mixture, const Matrix& fake_emb,
                       const LossConfig& cfg) {
  require_batch(fake_emb, mixture.dim(), "g_loss_mdgan");
  if (cfg.generator_mode == GeneratorMode::minimax) return mdgan_fake_term(mixture, fake_emb, cfg);

  LossValue out;
  const std::vector<double> ll = mixture.log_lk_batch(fake_emb, &out.grad_fake);
  const double inv_n = 1.0 / static_cast<double>(fake_emb.rows());
  double sum = 0.0;
  for (double v : ll) sum += v;
  out.value = -sum * inv_n;
  for (double& v : out.grad_fake.values()) v *= -inv_n;
  return out;
}

LossValue d_loss_vanilla(const Matrix& real_logit, const Matrix& fake_logit) {
  require_batch(real_logit, 1, "d_loss_vanilla (real)");
  require_batch(fake_logit, 1, "d_loss_vanilla (fake)");
  LossValue out;
  out.grad_real = Matrix(real_logit.rows(), 1);
  out.grad_fake = Matrix(fake_logit.rows(), 1);
  const double inv_r = 1.0 / static_cast<double>(real_logit.rows());
  const double inv_f = 1.0 / static_cast<double>(fake_logit.rows());
  double real_sum = 0.0;
  for (std::size_t i = 0; i < real_logit.rows(); ++i) {
    const double x = real_logit(i, 0);
    real_sum += softplus(-x);
    out.grad_real(i, 0) = -sigmoid(-x) * inv_r;
  }
  double fake_sum = 0.0;
  for (std::size_t i = 0; i < fake_logit.rows(); ++i) {
    const double x = fake_logit(i, 0);
    fake_sum += softplus(x);
    out.grad_fake(i, 0) = sigmoid(x) * inv_f;
  }
  out.value = real_sum * inv_r + fake_sum * inv_f;
  return out;
}

LossValue g_loss_vanilla(const Matrix& fake_logit) {
  require_batch(fake_logit, 1, "g_loss_vanilla");
  LossValue out;
  out.grad_fake = Matrix(fake_logit.rows(), 1);
  const double inv_n = 1.0 / static_cast<double>(fake_logit.rows());
  double sum = 0.0;
  for (std::size_t i = 0; i < fake_logit.rows(); ++i) {
    const double x = fake_logit(i, 0);
    sum += softplus(-x);
    out.grad_fake(i, 0) = -sigmoid(-x) * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

}  // namespace mdgan
