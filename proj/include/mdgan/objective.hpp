#pragma once

#include <string_view>

#include "mdgan/sgmm.hpp"
#include "mdgan/tensor.hpp"

namespace mdgan {

enum class GeneratorMode {
  minimax,        // +E[log(lambda - lk(D(G(z))))], the adversarial objective as written
  nonsaturating,  // -E[log lk(D(G(z)))]
};

std::string_view to_string(GeneratorMode mode);
GeneratorMode parse_generator_mode(std::string_view text);

struct LossConfig {
  // Upper clamp on log(lk/lambda) is -clamp_epsilon, keeping log(lambda - lk) finite.
  double clamp_epsilon = 1e-7;
  GeneratorMode generator_mode = GeneratorMode::minimax;

  // Throws std::invalid_argument unless clamp_epsilon is in (0, 0.1).
  void validate() const;
};

// A scalar loss and its gradient with respect to each embedding batch it
// consumed. Gradients that do not apply are left empty.
struct LossValue {
  double value = 0.0;
  Matrix grad_real;
  Matrix grad_fake;
};

// log(lambda - lk(e)) for one embedding, computed as
// log_lambda + log1p(-exp(delta)) with delta = log_lk(e) - log_lambda clamped
// to <= -clamp_epsilon. When grad is non-empty it receives d/de (zero inside the
// clamp region).
double log_lambda_minus_lk(const SimplexMixture& mixture, std::span<const double> e,
                           const LossConfig& cfg, std::span<double> grad = {});

// mean_i log(lambda - lk(fake_i)): the fake-side term of the adversarial value.
LossValue mdgan_fake_term(const SimplexMixture& mixture, const Matrix& fake_emb,
                          const LossConfig& cfg);

// -mean log lk(real) - mean log(lambda - lk(fake)), i.e. the negated value the
// discriminator maximizes.
LossValue d_loss_mdgan(const SimplexMixture& mixture, const Matrix& real_emb,
                       const Matrix& fake_emb, const LossConfig& cfg);

LossValue g_loss_mdgan(const SimplexMixture& mixture, const Matrix& fake_emb,
                       const LossConfig& cfg);

// Sigmoid cross-entropy on n x 1 logit batches.
LossValue d_loss_vanilla(const Matrix& real_logit, const Matrix& fake_logit);
// Nonsaturating generator loss -mean log sigmoid(fake).
LossValue g_loss_vanilla(const Matrix& fake_logit);

}  // namespace mdgan
